use handoff::report::{emit_report, Format};
use handoff_core::sim::{ClientMetrics, HandoffRecord, MetricsReport, PacketCounts, PacketEvent, PacketEventKind};

fn small_report() -> MetricsReport {
    MetricsReport {
        scenario: "golden".into(),
        seed: 7,
        duration_s: 2.0,
        clients: vec![ClientMetrics {
            client: 0,
            mean_throughput_mbps: 41.234567,
            median_throughput_mbps: 40.5,
            throughput_cdf: vec![38.2, 44.269134],
            delivered_bits: 82469134.0,
            handoffs: vec![
                HandoffRecord {
                    t_start: 1.3,
                    from: 0,
                    to: 2,
                    buffered_bits: 58400.0,
                    latency_s: 0.0301234,
                    correct: Some(true),
                },
                HandoffRecord {
                    t_start: 1.95,
                    from: 2,
                    to: 4,
                    buffered_bits: 0.0,
                    latency_s: f64::NAN,
                    correct: Some(false),
                },
            ],
            packets: PacketCounts {
                sent: 7100,
                delivered: 7061,
                lost_in_channel: 1,
                dropped_at_buffer: 5,
                in_flight_at_end: 33,
                retransmissions: 6,
                handoff_retransmissions: 5,
                ecn_marks: 2,
            },
            estimation_error_m: Some(0.123456789),
            selection_accuracy: Some(0.5),
        }],
        packet_log: vec![
            PacketEvent {
                t: 0.0,
                kind: PacketEventKind::ArrivalAtController,
                client: 0,
                packet: 0,
                ap: 0,
            },
            PacketEvent {
                t: 1.3,
                kind: PacketEventKind::HandoffStart,
                client: 0,
                packet: u64::MAX,
                ap: 2,
            },
        ],
    }
}

/// Set UPDATE_GOLDEN=1 to rewrite the expected files after a deliberate
/// format change.
#[test]
fn golden_files() {
    let d = tempfile::tempdir().unwrap();
    emit_report(&small_report(), d.path(), Format::Csv).unwrap();
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for f in ["summary.csv", "handoffs.csv", "throughput_cdf.csv", "packets.csv"] {
        let got = std::fs::read_to_string(d.path().join(f)).unwrap();
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(golden.join(f), &got).unwrap();
        }
        let want = std::fs::read_to_string(golden.join(f)).unwrap();
        assert_eq!(got, want, "{f}");
    }
}
