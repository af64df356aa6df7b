//! Information packets and their newline-delimited JSON emission.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{classify, AwarenessClass, ClassificationThresholds};
use crate::error::{Error, Result};

/// Measurements a run feeds into packet generation.
#[derive(Debug, Clone)]
pub struct PacketContext {
    pub t_emit: f64,
    pub q: u32,
    pub level: f64,
    pub correlation: f64,
    pub bloch: (f64, f64, f64),
    pub theta: Vec<f64>,
}

/// The classified output record. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationPacket {
    pub id: u64,
    pub t_emit: f64,
    pub class: AwarenessClass,
    pub level: f64,
    pub correlation: f64,
    pub q: u32,
    pub bloch: [f64; 3],
    pub theta: Vec<f64>,
    pub directive: String,
}

/// Serializes packets one per line with a strictly increasing id. All
/// emission for a run goes through one writer so ids stay monotone.
pub struct PacketWriter<W: Write> {
    sink: W,
    next_id: u64,
}

impl<W: Write> PacketWriter<W> {
    pub fn new(sink: W) -> Self {
        Self { sink, next_id: 0 }
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    /// Classify and, when a band matches, emit a packet. `Unclassified`
    /// inputs emit nothing and leave the counter untouched.
    pub fn generate_packet(
        &mut self,
        ctx: &PacketContext,
        thresholds: &ClassificationThresholds,
    ) -> Result<Option<InformationPacket>> {
        let (class, directive) = classify(ctx.q, ctx.level, ctx.correlation, thresholds);
        if class == AwarenessClass::Unclassified {
            return Ok(None);
        }
        let packet = InformationPacket {
            id: self.next_id,
            t_emit: ctx.t_emit,
            class,
            level: ctx.level,
            correlation: ctx.correlation,
            q: ctx.q,
            bloch: [ctx.bloch.0, ctx.bloch.1, ctx.bloch.2],
            theta: ctx.theta.clone(),
            directive,
        };
        let line = serde_json::to_string(&packet)?;
        self.sink
            .write_all(line.as_bytes())
            .and_then(|_| self.sink.write_all(b"\n"))
            .map_err(|e| Error::Io {
                path: "packet stream".to_string(),
                source: e,
            })?;
        self.next_id += 1;
        Ok(Some(packet))
    }

    pub fn into_inner(self) -> W {
        self.sink
    }
}
