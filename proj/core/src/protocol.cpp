#include "danrti/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "danrti/errors.hpp"
#include "danrti/rng.hpp"

namespace danrti {

SwitchSchedule build_switch_schedule(int tx_elements, int rx_elements, double symbol_length_s) {
    if (tx_elements < 1 || rx_elements < 1)
        throw ContractError("switch schedule needs at least one element per side");
    if (symbol_length_s <= 0.0) throw ContractError("symbol length must be positive");

    SwitchSchedule s;
    s.symbol_length_s = symbol_length_s;
    const int per_tx = 2 * rx_elements;
    const int total = tx_elements * per_tx;
    s.slots.reserve(total);
    for (int slot = 0; slot < total; ++slot) {
        SwitchSlot entry;
        entry.symbol_slot = slot;
        entry.time_offset_s = slot * symbol_length_s;
        entry.tx_element = slot / per_tx;
        entry.rx_element = (slot % per_tx) / 2;
        s.slots.push_back(entry);
    }
    s.snapshot_duration_s = total * symbol_length_s;
    return s;
}

MeasurementPlan build_plan(int num_nodes, double t_rep_s) {
    if (num_nodes < 2) throw ContractError("plan needs at least two nodes");
    if (t_rep_s <= 0.0) throw ContractError("repetition interval must be positive");
    MeasurementPlan plan;
    plan.t_rep_s = t_rep_s;
    for (int tx = 1; tx < num_nodes; ++tx) {
        MeasurementPhase phase;
        phase.tx_node = tx;
        for (int rx = tx + 1; rx <= num_nodes; ++rx) phase.rx_nodes.push_back(rx);
        plan.phases.push_back(std::move(phase));
    }
    return plan;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::kCommandSent: return "command_sent";
        case EventKind::kCommandReceived: return "command_received";
        case EventKind::kTxStart: return "tx_start";
        case EventKind::kTxNotifyReceived: return "tx_notify_received";
        case EventKind::kRxRequestSent: return "rx_request_sent";
        case EventKind::kRxRequestReceived: return "rx_request_received";
        case EventKind::kCycleSkipped: return "cycle_skipped";
        case EventKind::kCaptureStart: return "capture_start";
        case EventKind::kCaptureEnd: return "capture_end";
        case EventKind::kTransferComplete: return "transfer_complete";
        case EventKind::kPhaseComplete: return "phase_complete";
    }
    return "unknown";
}

EventLog simulate_round(const MeasurementPlan& plan, const SwitchSchedule& schedule,
                        const LatencyModel& latency, std::uint64_t seed) {
    if (plan.phases.empty()) throw ContractError("plan has no phases");
    if (latency.min_s < 0.0 || latency.max_s < latency.min_s)
        throw ContractError("latency bounds must satisfy 0 <= min <= max");

    auto rng = make_rng(derive_seed(seed, 0x9e0));
    std::uniform_real_distribution<double> lat(latency.min_s, latency.max_s);
    auto draw = [&]() { return latency.max_s == latency.min_s ? latency.min_s : lat(rng); };

    const double t_rep = plan.t_rep_s;
    // First grid point strictly after t.
    auto next_grid = [&](double t) { return (std::floor(t / t_rep) + 1.0) * t_rep; };

    EventLog log;
    auto emit = [&](double t, int node, EventKind kind, int phase, std::string detail = "") {
        log.events.push_back({t, node, kind, phase, std::move(detail)});
    };

    double cursor = 0.0;
    for (std::size_t p = 0; p < plan.phases.size(); ++p) {
        const MeasurementPhase& phase = plan.phases[p];
        const int phase_id = static_cast<int>(p) + 1;

        emit(cursor, 0, EventKind::kCommandSent, phase_id, "tx=" + std::to_string(phase.tx_node));
        const double cmd_arrival = cursor + draw();
        emit(cmd_arrival, phase.tx_node, EventKind::kCommandReceived, phase_id);
        emit(cmd_arrival, phase.tx_node, EventKind::kTxStart, phase_id);
        const double notify_arrival = cmd_arrival + draw();
        emit(notify_arrival, 0, EventKind::kTxNotifyReceived, phase_id);

        double phase_end = notify_arrival;
        for (const int rx : phase.rx_nodes) {
            emit(notify_arrival, 0, EventKind::kRxRequestSent, phase_id,
                 "rx=" + std::to_string(rx));
            const double request_arrival = notify_arrival + draw();
            emit(request_arrival, rx, EventKind::kRxRequestReceived, phase_id);

            const double capture_start = next_grid(request_arrival);
            const long long sent_cycle = static_cast<long long>(std::floor(notify_arrival / t_rep));
            const long long capture_cycle = static_cast<long long>(std::llround(capture_start / t_rep));
            if (capture_cycle > sent_cycle + 1) {
                emit(request_arrival, rx, EventKind::kCycleSkipped, phase_id,
                     "skipped=" + std::to_string(capture_cycle - sent_cycle - 1));
            }
            emit(capture_start, rx, EventKind::kCaptureStart, phase_id,
                 "cycle=" + std::to_string(capture_cycle));
            const double capture_end = capture_start + schedule.snapshot_duration_s;
            emit(capture_end, rx, EventKind::kCaptureEnd, phase_id);

            double done = capture_end;
            if (!plan.local_save) {
                done = capture_end + draw();
                emit(done, 0, EventKind::kTransferComplete, phase_id,
                     "rx=" + std::to_string(rx));
            }
            phase_end = std::max(phase_end, done);
        }
        emit(phase_end, 0, EventKind::kPhaseComplete, phase_id);
        cursor = phase_end + plan.guard_s;
    }

    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const ProtocolEvent& a, const ProtocolEvent& b) {
                         return a.time_s < b.time_s;
                     });
    log.round_duration_s = log.events.empty() ? 0.0 : log.events.back().time_s;
    return log;
}

}  // namespace danrti
