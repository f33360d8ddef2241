use super::HeatmapError;
use crate::raster::ChannelStack;

pub const LAYOUT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"FHM1";

/// `FHM1` header (resolution, K, layout version), the length-prefixed JSON
/// channel-name table, then K row-major little-endian f32 planes.
pub fn encode_stack(stack: &ChannelStack) -> Vec<u8> {
    let names = serde_json::to_vec(stack.names()).expect("names serialize");
    let mut out = Vec::with_capacity(20 + names.len() + 4 * stack.data().len());
    out.extend_from_slice(MAGIC);
    out.extend((stack.resolution() as u32).to_le_bytes());
    out.extend((stack.channels() as u32).to_le_bytes());
    out.extend(LAYOUT_VERSION.to_le_bytes());
    out.extend((names.len() as u32).to_le_bytes());
    out.extend(names);
    for v in stack.data() {
        out.extend(v.to_le_bytes());
    }
    out
}

fn corrupt(msg: impl Into<String>) -> HeatmapError {
    HeatmapError::Format(msg.into())
}

pub fn decode_stack(bytes: &[u8]) -> Result<ChannelStack, HeatmapError> {
    let u32_at = |at: usize, what: &str| -> Result<u32, HeatmapError> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| corrupt(format!("truncated header: missing {what}")))
    };
    if bytes.get(..4) != Some(MAGIC.as_slice()) {
        return Err(corrupt("not an FHM1 file (bad magic)"));
    }
    let res = u32_at(4, "resolution")? as usize;
    let k = u32_at(8, "channel count")? as usize;
    let version = u32_at(12, "layout version")?;
    if version != LAYOUT_VERSION {
        return Err(corrupt(format!("unsupported layout version {version}")));
    }
    let name_len = u32_at(16, "name table length")? as usize;
    let table = bytes
        .get(20..20 + name_len)
        .ok_or_else(|| corrupt("truncated channel name table"))?;
    let names: Vec<String> =
        serde_json::from_slice(table).map_err(|e| corrupt(format!("channel name table: {e}")))?;
    if names.len() != k {
        return Err(corrupt(format!(
            "header declares {k} channels but the name table lists {}",
            names.len()
        )));
    }
    let body = &bytes[20 + name_len..];
    let expected = res
        .checked_mul(res)
        .and_then(|n| n.checked_mul(k))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| corrupt("header dimensions overflow"))?;
    if body.len() != expected {
        return Err(corrupt(format!(
            "expected {expected} data bytes, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ChannelStack::from_parts(res, names, data))
}
