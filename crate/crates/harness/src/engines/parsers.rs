//! Per-engine response-body parsers.
//!
//! Each engine's markup is pinned to an adapter version; bundles archive
//! the version they were fetched with, and parsing refuses bundles from
//! another version. Parsers are pure functions of the body bytes so
//! archived bundles can be re-parsed at any time.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use super::{EngineId, ResultKind};

/// One result as it appears on the page, before positions are assigned.
/// Fields the page did not carry are empty strings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawSer {
    #[serde(default)]
    pub ser_url: String,
    #[serde(default)]
    pub page_url: String,
    #[serde(default)]
    pub image_url: String,
    #[serde(default)]
    pub thumbnail_url: String,
}

pub fn adapter_version(engine: EngineId) -> &'static str {
    match engine {
        EngineId::Baidu => "baidu-v1",
        EngineId::Bing => "bing-v1",
        EngineId::Fixture => "fixture-v1",
        EngineId::Google => "google-v1",
        EngineId::Yandex => "yandex-v1",
    }
}

/// Parses one archived body for one result kind. `Err` is a parse
/// failure (page shape unrecognized), distinct from `Ok(vec![])` which
/// means the engine returned no results.
pub fn parse_body(
    engine: EngineId,
    kind: ResultKind,
    body: &[u8],
) -> Result<Vec<RawSer>, String> {
    match engine {
        EngineId::Baidu => parse_baidu(kind, body),
        EngineId::Bing => parse_bing(kind, body),
        EngineId::Fixture => parse_fixture(body),
        EngineId::Google => parse_google(kind, body),
        EngineId::Yandex => parse_yandex(kind, body),
    }
}

#[derive(Deserialize)]
struct BaiduBody {
    status: i64,
    #[serde(default)]
    data: Option<BaiduData>,
}

#[derive(Deserialize, Default)]
struct BaiduData {
    #[serde(default)]
    simipics: Option<BaiduList>,
    #[serde(default)]
    samepics: Option<BaiduList>,
}

#[derive(Deserialize)]
struct BaiduList {
    #[serde(default)]
    list: Vec<BaiduItem>,
}

#[derive(Deserialize)]
struct BaiduItem {
    #[serde(default, rename = "fromUrl")]
    from_url: String,
    #[serde(default)]
    url: String,
    #[serde(default, rename = "objUrl")]
    obj_url: String,
    #[serde(default, rename = "thumbUrl")]
    thumb_url: String,
}

fn parse_baidu(kind: ResultKind, body: &[u8]) -> Result<Vec<RawSer>, String> {
    let parsed: BaiduBody =
        serde_json::from_slice(body).map_err(|e| format!("not baidu JSON: {e}"))?;
    if parsed.status != 0 {
        return Err(format!("baidu status {}", parsed.status));
    }
    let data = parsed.data.unwrap_or_default();
    let list = match kind {
        ResultKind::SimilarTo => data.simipics,
        ResultKind::PagesWith => data.samepics,
    };
    Ok(list
        .map(|l| l.list)
        .unwrap_or_default()
        .into_iter()
        .map(|item| RawSer {
            ser_url: item.from_url,
            page_url: item.url,
            image_url: item.obj_url,
            thumbnail_url: item.thumb_url,
        })
        .collect())
}

/// The slice of `body` from `marker` to the following `</div>`; the item
/// lists inside engine sections never nest divs.
fn section<'a>(body: &'a str, marker: &str) -> Option<&'a str> {
    let start = body.find(marker)?;
    let rest = &body[start..];
    let end = rest.find("</div>").map_or(rest.len(), |i| i);
    Some(&rest[..end])
}

fn bing_item_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"<a class="iusc" href="([^"]*)"(?: m='([^']*)')?"#).expect("bing regex")
    })
}

fn parse_bing(kind: ResultKind, body: &[u8]) -> Result<Vec<RawSer>, String> {
    let text = std::str::from_utf8(body).map_err(|e| format!("not utf-8: {e}"))?;
    if !text.contains(r#"id="i_results""#) {
        return Err("no i_results container".to_string());
    }
    let marker = match kind {
        ResultKind::SimilarTo => r#"class="similar-images""#,
        ResultKind::PagesWith => r#"class="pages-including""#,
    };
    let Some(section) = section(text, marker) else {
        return Ok(Vec::new());
    };
    Ok(bing_item_re()
        .captures_iter(section)
        .map(|cap| {
            let meta: serde_json::Value = cap
                .get(2)
                .and_then(|m| serde_json::from_str(m.as_str()).ok())
                .unwrap_or(serde_json::Value::Null);
            let field = |key: &str| {
                meta.get(key)
                    .and_then(|v| v.as_str())
                    .unwrap_or_default()
                    .to_string()
            };
            RawSer {
                ser_url: cap[1].to_string(),
                page_url: field("purl"),
                image_url: field("murl"),
                thumbnail_url: field("turl"),
            }
        })
        .collect())
}

fn google_item_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r#"<a class="rg_l" href="([^"]*)"(?: data-ref="([^"]*)")?><img src="([^"]*)"(?: data-iurl="([^"]*)")?>"#,
        )
        .expect("google regex")
    })
}

fn parse_google(kind: ResultKind, body: &[u8]) -> Result<Vec<RawSer>, String> {
    let text = std::str::from_utf8(body).map_err(|e| format!("not utf-8: {e}"))?;
    if !text.contains(r#"id="isr_mc""#) {
        return Err("no isr_mc container".to_string());
    }
    let marker = match kind {
        ResultKind::SimilarTo => r#"class="img-brk""#,
        ResultKind::PagesWith => r#"class="srg""#,
    };
    let Some(section) = section(text, marker) else {
        return Ok(Vec::new());
    };
    Ok(google_item_re()
        .captures_iter(section)
        .map(|cap| RawSer {
            ser_url: cap[1].to_string(),
            page_url: cap.get(2).map_or(String::new(), |m| m.as_str().to_string()),
            thumbnail_url: cap[3].to_string(),
            image_url: cap.get(4).map_or(String::new(), |m| m.as_str().to_string()),
        })
        .collect())
}

fn yandex_item_re(class: &str) -> Regex {
    Regex::new(&format!(
        r#"<a class="{class}" href="([^"]*)"(?: data-url="([^"]*)")?><img src="([^"]*)"(?: data-src="([^"]*)")?>"#
    ))
    .expect("yandex regex")
}

fn parse_yandex(kind: ResultKind, body: &[u8]) -> Result<Vec<RawSer>, String> {
    let text = std::str::from_utf8(body).map_err(|e| format!("not utf-8: {e}"))?;
    let similar = r#"class="CbirSimilar-Thumbs""#;
    let sites = r#"class="CbirSites""#;
    if !text.contains(similar) && !text.contains(sites) {
        return Err("no cbir sections".to_string());
    }
    let (marker, item_class) = match kind {
        ResultKind::SimilarTo => (similar, "CbirSimilar-Item"),
        ResultKind::PagesWith => (sites, "CbirSites-Item"),
    };
    let Some(section) = section(text, marker) else {
        return Ok(Vec::new());
    };
    Ok(yandex_item_re(item_class)
        .captures_iter(section)
        .map(|cap| RawSer {
            ser_url: cap[1].to_string(),
            page_url: cap.get(2).map_or(String::new(), |m| m.as_str().to_string()),
            thumbnail_url: cap[3].to_string(),
            image_url: cap.get(4).map_or(String::new(), |m| m.as_str().to_string()),
        })
        .collect())
}

#[derive(Serialize, Deserialize)]
struct FixtureBody {
    #[serde(default)]
    results: Vec<RawSer>,
}

fn parse_fixture(body: &[u8]) -> Result<Vec<RawSer>, String> {
    let value: serde_json::Value =
        serde_json::from_slice(body).map_err(|e| format!("not a fixture bundle: {e}"))?;
    if !value.is_object() {
        return Err("not a fixture bundle: expected a results object".to_string());
    }
    let parsed: FixtureBody =
        serde_json::from_value(value).map_err(|e| format!("not a fixture bundle: {e}"))?;
    Ok(parsed.results)
}

/// Serializes records back into the fixture bundle format, the inverse
/// of [`parse_body`] for [`EngineId::Fixture`].
pub fn fixture_body(results: &[RawSer]) -> Vec<u8> {
    serde_json::to_vec_pretty(&FixtureBody {
        results: results.to_vec(),
    })
    .expect("fixture body serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(stem: &str) -> RawSer {
        RawSer {
            ser_url: format!("{stem}/ser"),
            page_url: format!("{stem}/page"),
            image_url: format!("{stem}/image"),
            thumbnail_url: format!("{stem}/thumb"),
        }
    }

    #[test]
    fn baidu_both_kinds() {
        let body = br#"{
            "status": 0,
            "data": {
                "simipics": {"list": [
                    {"fromUrl": "a/ser", "url": "a/page", "objUrl": "a/image", "thumbUrl": "a/thumb"},
                    {"fromUrl": "b/ser", "url": "b/page", "objUrl": "b/image", "thumbUrl": "b/thumb"}
                ]},
                "samepics": {"list": [
                    {"fromUrl": "c/ser", "url": "c/page", "objUrl": "c/image", "thumbUrl": "c/thumb"}
                ]}
            }
        }"#;
        let similar = parse_body(EngineId::Baidu, ResultKind::SimilarTo, body).unwrap();
        assert_eq!(similar, vec![raw("a"), raw("b")]);
        let pages = parse_body(EngineId::Baidu, ResultKind::PagesWith, body).unwrap();
        assert_eq!(pages, vec![raw("c")]);
    }

    #[test]
    fn baidu_error_status_and_garbage_fail() {
        let err = parse_body(EngineId::Baidu, ResultKind::SimilarTo, br#"{"status": 2}"#);
        assert!(err.is_err());
        assert!(parse_body(EngineId::Baidu, ResultKind::SimilarTo, b"<html>").is_err());
    }

    #[test]
    fn baidu_missing_list_is_empty() {
        let body = br#"{"status": 0, "data": {}}"#;
        assert!(parse_body(EngineId::Baidu, ResultKind::SimilarTo, body)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bing_sections_and_metadata() {
        let body = br#"<html><body><div id="i_results">
<div class="similar-images"><ul>
<li class="imgpt"><a class="iusc" href="a/ser" m='{"purl":"a/page","murl":"a/image","turl":"a/thumb"}'></a></li>
</ul></div>
<div class="pages-including"><ul>
<li class="imgpt"><a class="iusc" href="b/ser" m='{"purl":"b/page","murl":"b/image","turl":"b/thumb"}'></a></li>
<li class="imgpt"><a class="iusc" href="c/ser"></a></li>
</ul></div>
</div></body></html>"#;
        let similar = parse_body(EngineId::Bing, ResultKind::SimilarTo, body).unwrap();
        assert_eq!(similar, vec![raw("a")]);
        let pages = parse_body(EngineId::Bing, ResultKind::PagesWith, body).unwrap();
        assert_eq!(pages.len(), 2);
        assert_eq!(pages[0], raw("b"));
        // The anchor without metadata keeps its SER URL, rest empty.
        assert_eq!(pages[1].ser_url, "c/ser");
        assert_eq!(pages[1].page_url, "");
        assert_eq!(pages[1].image_url, "");
        assert_eq!(pages[1].thumbnail_url, "");
    }

    #[test]
    fn bing_without_container_fails() {
        assert!(parse_body(EngineId::Bing, ResultKind::SimilarTo, b"<html></html>").is_err());
    }

    #[test]
    fn bing_missing_section_is_empty() {
        let body = br#"<div id="i_results"><div class="pages-including"><ul></ul></div></div>"#;
        assert!(parse_body(EngineId::Bing, ResultKind::SimilarTo, body)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn google_sections() {
        let body = br#"<html><body><div id="isr_mc">
<div class="img-brk">
<a class="rg_l" href="a/ser" data-ref="a/page"><img src="a/thumb" data-iurl="a/image"></a>
</div>
<div class="srg">
<a class="rg_l" href="b/ser" data-ref="b/page"><img src="b/thumb" data-iurl="b/image"></a>
<a class="rg_l" href="c/ser"><img src="c/thumb"></a>
</div>
</div></body></html>"#;
        let similar = parse_body(EngineId::Google, ResultKind::SimilarTo, body).unwrap();
        assert_eq!(similar, vec![raw("a")]);
        let pages = parse_body(EngineId::Google, ResultKind::PagesWith, body).unwrap();
        assert_eq!(pages[0], raw("b"));
        assert_eq!(pages[1].ser_url, "c/ser");
        assert_eq!(pages[1].thumbnail_url, "c/thumb");
        assert_eq!(pages[1].page_url, "");
        assert_eq!(pages[1].image_url, "");
    }

    #[test]
    fn google_without_container_fails() {
        assert!(parse_body(EngineId::Google, ResultKind::PagesWith, b"nope").is_err());
    }

    #[test]
    fn yandex_sections() {
        let body = br#"<html><body>
<div class="CbirSimilar-Thumbs">
<a class="CbirSimilar-Item" href="a/ser" data-url="a/page"><img src="a/thumb" data-src="a/image"></a>
</div>
<div class="CbirSites">
<a class="CbirSites-Item" href="b/ser" data-url="b/page"><img src="b/thumb" data-src="b/image"></a>
</div>
</body></html>"#;
        let similar = parse_body(EngineId::Yandex, ResultKind::SimilarTo, body).unwrap();
        assert_eq!(similar, vec![raw("a")]);
        let pages = parse_body(EngineId::Yandex, ResultKind::PagesWith, body).unwrap();
        assert_eq!(pages, vec![raw("b")]);
    }

    #[test]
    fn yandex_one_section_present_other_kind_empty() {
        let body = br#"<div class="CbirSites">
<a class="CbirSites-Item" href="b/ser" data-url="b/page"><img src="b/thumb" data-src="b/image"></a>
</div>"#;
        assert!(parse_body(EngineId::Yandex, ResultKind::SimilarTo, body)
            .unwrap()
            .is_empty());
        assert!(parse_body(EngineId::Yandex, ResultKind::SimilarTo, b"<html></html>").is_err());
    }

    #[test]
    fn fixture_round_trips() {
        let results = vec![raw("x"), raw("y"), RawSer::default()];
        let body = fixture_body(&results);
        let parsed = parse_body(EngineId::Fixture, ResultKind::SimilarTo, &body).unwrap();
        assert_eq!(parsed, results);
        assert!(parse_body(EngineId::Fixture, ResultKind::SimilarTo, b"[]").is_err());
    }

    #[test]
    fn fixture_empty_results() {
        let parsed =
            parse_body(EngineId::Fixture, ResultKind::PagesWith, br#"{"results": []}"#).unwrap();
        assert!(parsed.is_empty());
    }

    #[test]
    fn versions_are_engine_specific() {
        let mut versions: Vec<&str> = EngineId::ALL.iter().map(|e| adapter_version(*e)).collect();
        versions.sort();
        versions.dedup();
        assert_eq!(versions.len(), EngineId::ALL.len());
    }
}
