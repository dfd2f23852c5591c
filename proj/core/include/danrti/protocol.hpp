#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace danrti {

/// One sounding symbol in the TDM antenna-switching sequence.
struct SwitchSlot {
    double time_offset_s = 0.0;
    int tx_element = 0;
    int rx_element = 0;
    int symbol_slot = 0;
};

/// TDM timeline for one link: the transmitter repeats each sounding symbol
/// twice per receive element so the receiver can switch mid-dwell, then
/// advances its own element.
struct SwitchSchedule {
    std::vector<SwitchSlot> slots;
    double symbol_length_s = 1.28e-6;
    double snapshot_duration_s = 0.0;  // M_T * 2 M_R * symbol length
};

SwitchSchedule build_switch_schedule(int tx_elements, int rx_elements, double symbol_length_s);

struct MeasurementPhase {
    int tx_node = 0;
    std::vector<int> rx_nodes;
};

/// Reciprocity-based multi-link plan: phase p transmits from node p toward
/// all higher-id nodes, covering every link exactly once.
struct MeasurementPlan {
    std::vector<MeasurementPhase> phases;
    double t_rep_s = 0.1;
    double guard_s = 0.0;
    bool local_save = false;  // skip slave-to-master data transfer
};

MeasurementPlan build_plan(int num_nodes, double t_rep_s = 0.1);

enum class EventKind {
    kCommandSent,        // master -> Tx slave
    kCommandReceived,
    kTxStart,            // Tx begins its repeating transmission
    kTxNotifyReceived,   // master got the transmission-start notification
    kRxRequestSent,      // master -> one Rx slave
    kRxRequestReceived,
    kCycleSkipped,       // capture slipped past >= 1 transmission cycle
    kCaptureStart,
    kCaptureEnd,
    kTransferComplete,   // slave data landed at the master
    kPhaseComplete,
};

const char* to_string(EventKind kind);

struct ProtocolEvent {
    double time_s = 0.0;
    int node = 0;  // 0 = master PC, otherwise slave node id
    EventKind kind = EventKind::kCommandSent;
    int phase = 0;
    std::string detail;
};

struct EventLog {
    std::vector<ProtocolEvent> events;
    double round_duration_s = 0.0;
};

/// Command-channel latency draw, uniform in [min_s, max_s].
struct LatencyModel {
    double min_s = 1e-3;
    double max_s = 20e-3;
};

/// Simulates one full measurement round over all phases. Capture windows
/// start at the first T_rep grid point strictly after the reception request
/// arrives; all draws derive from `seed`.
EventLog simulate_round(const MeasurementPlan& plan, const SwitchSchedule& schedule,
                        const LatencyModel& latency, std::uint64_t seed);

}  // namespace danrti
