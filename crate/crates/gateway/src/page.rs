//! Cursor pagination. A cursor pins the snapshot the first page was read
//! from, so later pages tile the same result set even while writes land.

use std::sync::Arc;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use sciarchive::store::{Snapshot, Store};

use crate::error::ApiError;

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 200;

#[derive(Debug, Clone, Default, Deserialize)]
pub struct PageParams {
    pub cursor: Option<String>,
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    pub snapshot_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_cursor: Option<String>,
}

pub fn encode_cursor(snapshot_id: u64, offset: usize) -> String {
    URL_SAFE_NO_PAD.encode(format!("{snapshot_id}:{offset}"))
}

pub fn decode_cursor(cursor: &str) -> Result<(u64, usize), ApiError> {
    let bad = || ApiError::new(400, "invalid_cursor", "malformed cursor");
    let raw = URL_SAFE_NO_PAD.decode(cursor).map_err(|_| bad())?;
    let text = String::from_utf8(raw).map_err(|_| bad())?;
    let (id, offset) = text.split_once(':').ok_or_else(bad)?;
    Ok((id.parse().map_err(|_| bad())?, offset.parse().map_err(|_| bad())?))
}

/// Where a page starts: the pinned snapshot and offset, or the latest
/// snapshot at offset zero.
pub struct Position {
    pub snapshot: Arc<Snapshot>,
    pub offset: usize,
    pub limit: usize,
}

impl PageParams {
    pub fn position(&self, store: &Store) -> Result<Position, ApiError> {
        let limit = self.limit.unwrap_or(DEFAULT_LIMIT);
        if limit == 0 || limit > MAX_LIMIT {
            return Err(ApiError::new(400, "invalid_limit", format!("limit must lie in 1..={MAX_LIMIT}")));
        }
        let (snapshot, offset) = match &self.cursor {
            None => (store.snapshot(), 0),
            Some(c) => {
                let (id, offset) = decode_cursor(c)?;
                let snap = store
                    .snapshot_at(id)
                    .ok_or_else(|| ApiError::new(410, "cursor_expired", "the snapshot behind this cursor is gone"))?;
                (snap, offset)
            }
        };
        Ok(Position { snapshot, offset, limit })
    }
}

impl Position {
    pub fn page<T>(&self, all: Vec<T>) -> Page<T> {
        let total = all.len();
        let end = self.offset.saturating_add(self.limit).min(total);
        let items: Vec<T> = all.into_iter().skip(self.offset).take(self.limit).collect();
        Page {
            items,
            snapshot_id: self.snapshot.id,
            next_cursor: (end < total).then(|| encode_cursor(self.snapshot.id, end)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cursor_roundtrip_and_garbage() {
        assert_eq!(decode_cursor(&encode_cursor(17, 400)).unwrap(), (17, 400));
        for bad in ["", "!!", &URL_SAFE_NO_PAD.encode("17"), &URL_SAFE_NO_PAD.encode("a:1")] {
            assert_eq!(decode_cursor(bad).unwrap_err().code, "invalid_cursor");
        }
    }

    #[test]
    fn pages_tile_the_result() {
        let store = Store::in_memory();
        let all: Vec<u32> = (0..23).collect();
        let mut params = PageParams {
            cursor: None,
            limit: Some(5),
        };
        let mut seen = vec![];
        loop {
            let page = params.position(&store).unwrap().page(all.clone());
            seen.extend(page.items);
            match page.next_cursor {
                Some(c) => params.cursor = Some(c),
                None => break,
            }
        }
        assert_eq!(seen, all);
    }

    #[test]
    fn limits() {
        let store = Store::in_memory();
        for (limit, ok) in [(Some(0), false), (Some(201), false), (Some(200), true), (None, true)] {
            let p = PageParams { cursor: None, limit };
            assert_eq!(p.position(&store).is_ok(), ok);
        }
        let p = PageParams {
            cursor: Some(encode_cursor(99, 0)),
            limit: None,
        };
        assert_eq!(p.position(&store).err().unwrap().code, "cursor_expired");
    }
}
