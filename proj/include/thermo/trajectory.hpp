#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/bath.hpp"
#include "thermo/rng.hpp"

namespace thermo {

enum class JumpDirection : std::uint8_t { up, down }; // up: 0 -> 1, down: 1 -> 0

struct JumpEvent {
    double time = 0.0;
    JumpDirection direction = JumpDirection::up;
};

// A two-level jump trajectory on [0, horizon]: initial state plus alternating
// jump events. Event times are strictly increasing and directions alternate
// starting consistently with n0.
struct Trajectory {
    int n0 = 0;
    std::vector<JumpEvent> events;
    double horizon = 0.0;

    int final_state() const {
        if (events.empty()) return n0;
        return events.back().direction == JumpDirection::up ? 1 : 0;
    }
    // State immediately after time t (right-continuous).
    int state_at(double t) const;
    void validate() const; // throws validation_error on broken invariants
};

// Sufficient statistics of the trajectory likelihood: k up-jumps, l down-jumps,
// tau1 = total time spent in state 1.
struct SufficientStats {
    std::int64_t k = 0;
    std::int64_t l = 0;
    double tau1 = 0.0;
};

SufficientStats sufficient_stats(const Trajectory& traj);

// Statistics restricted to the window [t_begin, t_end), plus the state at entry.
struct SegmentStats {
    SufficientStats stats;
    double duration = 0.0;
    int entry_state = 0;
};
SegmentStats segment_stats(const Trajectory& traj, double t_begin, double t_end);

enum class InitMode { fixed_ground, fixed_excited, thermal };

// Exact event-driven sampling: exponential dwell in state 0 at rate gamma_in and
// in state 1 at rate gamma_out. Thermal mode draws n0 from the steady state.
Trajectory sample_trajectory(const BathModel& model, double omega, double temperature,
                             double tau, InitMode init, rng::Stream& stream);

// CSV round-trip, header "time,state": first row 0,<n0>, one row per event with
// the post-event state, final row <tau>,<state>.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);
void write_trajectory_csv_file(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv_file(const std::string& path);

} // namespace thermo
