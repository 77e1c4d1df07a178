#include "thermo/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "thermo/csv.hpp"

namespace thermo {

namespace csv {
std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}
} // namespace csv

int Trajectory::state_at(double t) const {
    int state = n0;
    for (const auto& e : events) {
        if (e.time > t) break;
        state = (e.direction == JumpDirection::up) ? 1 : 0;
    }
    return state;
}

void Trajectory::validate() const {
    if (n0 != 0 && n0 != 1) throw validation_error("n0", "initial state must be 0 or 1");
    if (!(horizon > 0.0)) throw validation_error("tau", "trajectory horizon must be > 0");
    int state = n0;
    double prev = 0.0;
    for (const auto& e : events) {
        if (!(e.time > prev) || e.time > horizon)
            throw validation_error("events", "event times must be strictly increasing within (0, tau]");
        const bool up = e.direction == JumpDirection::up;
        if (up != (state == 0))
            throw validation_error("events", "jump directions must alternate consistently with the current state");
        state = up ? 1 : 0;
        prev = e.time;
    }
}

SufficientStats sufficient_stats(const Trajectory& traj) {
    SufficientStats s;
    int state = traj.n0;
    double prev = 0.0;
    for (const auto& e : traj.events) {
        if (state == 1) s.tau1 += e.time - prev;
        if (e.direction == JumpDirection::up) {
            ++s.k;
            state = 1;
        } else {
            ++s.l;
            state = 0;
        }
        prev = e.time;
    }
    if (state == 1) s.tau1 += traj.horizon - prev;
    return s;
}

SegmentStats segment_stats(const Trajectory& traj, double t_begin, double t_end) {
    SegmentStats seg;
    seg.duration = t_end - t_begin;
    seg.entry_state = traj.state_at(t_begin);
    int state = seg.entry_state;
    double prev = t_begin;
    auto it = std::upper_bound(traj.events.begin(), traj.events.end(), t_begin,
                               [](double t, const JumpEvent& e) { return t < e.time; });
    for (; it != traj.events.end() && it->time <= t_end; ++it) {
        if (state == 1) seg.stats.tau1 += it->time - prev;
        if (it->direction == JumpDirection::up) {
            ++seg.stats.k;
            state = 1;
        } else {
            ++seg.stats.l;
            state = 0;
        }
        prev = it->time;
    }
    if (state == 1) seg.stats.tau1 += t_end - prev;
    return seg;
}

Trajectory sample_trajectory(const BathModel& model, double omega, double temperature,
                             double tau, InitMode init, rng::Stream& stream) {
    if (!(tau > 0.0)) throw validation_error("tau", "tau must be > 0");
    const TransitionRates r = rates(model, omega, temperature);

    Trajectory traj;
    traj.horizon = tau;
    switch (init) {
        case InitMode::fixed_ground: traj.n0 = 0; break;
        case InitMode::fixed_excited: traj.n0 = 1; break;
        case InitMode::thermal: traj.n0 = stream.bernoulli(r.thermal_excited()) ? 1 : 0; break;
    }

    int state = traj.n0;
    double t = 0.0;
    for (;;) {
        const double rate = (state == 0) ? r.gamma_in : r.gamma_out;
        t += stream.exponential(rate);
        if (t >= tau) break;
        traj.events.push_back({t, state == 0 ? JumpDirection::up : JumpDirection::down});
        state = 1 - state;
    }
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "time,state\n";
    out << "0," << traj.n0 << "\n";
    int state = traj.n0;
    for (const auto& e : traj.events) {
        state = (e.direction == JumpDirection::up) ? 1 : 0;
        out << csv::g17(e.time) << "," << state << "\n";
    }
    out << csv::g17(traj.horizon) << "," << traj.final_state() << "\n";
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || csv::split_line(line).at(0) != "time")
        throw validation_error("input", "trajectory CSV must start with header time,state");

    std::vector<std::pair<double, int>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != 2) throw validation_error("input", "trajectory CSV rows must have two fields");
        rows.emplace_back(std::stod(fields[0]), std::stoi(fields[1]));
    }
    if (rows.size() < 2) throw validation_error("input", "trajectory CSV needs at least the initial and final rows");

    Trajectory traj;
    traj.n0 = rows.front().second;
    traj.horizon = rows.back().first;
    int state = traj.n0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const int next = rows[i].second;
        if (next == state) throw validation_error("input", "consecutive trajectory rows must change state");
        traj.events.push_back({rows[i].first, next == 1 ? JumpDirection::up : JumpDirection::down});
        state = next;
    }
    // The final row repeats the last state at the horizon unless the last event
    // happens to fall exactly at tau (then it already appeared as an event row).
    if (rows.back().second != state) {
        traj.events.push_back({rows.back().first, rows.back().second == 1 ? JumpDirection::up : JumpDirection::down});
    }
    traj.validate();
    return traj;
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_trajectory_csv(in);
}

} // namespace thermo
