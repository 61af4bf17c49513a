#pragma once

// Characteristic-grid oracle. With dt = dx the update
//
//   c_i = u_{i-1} + u_{i+1} - u_i^prev
//
// is the parallelogram identity and propagates free waves exactly, so every
// discrepancy against the exact engine comes from sampling and contacts.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "obstacle/freewave.hpp"

namespace obstacle {

struct PeriodicDomain {
  double period = 1.0;
  double origin = 0.0;
};

/// Truncated window [a, b]. After n steps only nodes at distance >= n dx from
/// both ends are valid; the rest are NaN.
struct WindowDomain {
  double a = -1.0;
  double b = 1.0;
};

using LatticeDomain = std::variant<PeriodicDomain, WindowDomain>;

enum class ContactKind { lower, upper };

/// `instantaneous` mirrors a candidate that crosses an obstacle and nothing
/// else; a contact between grid times then loses part of its impulse.
/// `mirror` also remembers which nodes were just reflected. A diamond whose
/// bottom is on the approach side and whose sides were just reflected
/// straddles the contact, so those sides are unfolded (u -> -u/h about the
/// obstacle) before the parallelogram rule and the result is folded back.
/// Near an active contact the solution is locally -h times the free wave, so
/// this is exact for uniform data and first order in general.
enum class ReflectionRule { mirror, instantaneous };

/// Level t = -dt. `first_order` is u0 - dt u1 with u1 averaged over
/// [x - dx/2, x + dx/2]. `dalembert` is the free wave at -dt,
/// (u0(x - dx) + u0(x + dx))/2 - integral of u1 over [x - dx, x + dx] / 2,
/// which makes free propagation exact at the nodes for any PL/PC data.
enum class GhostLevel { dalembert, first_order };

struct LatticeOptions {
  double restitution = 1.0;  // h in [0, 1]
  ReflectionRule rule = ReflectionRule::mirror;
  GhostLevel ghost = GhostLevel::dalembert;
};

const char* to_string(ContactKind kind);

struct ContactEvent {
  std::size_t index = 0;
  double x = 0.0;
  double t = 0.0;  // time of the reflected level
  ContactKind kind = ContactKind::lower;
  double velocity_before = 0.0;  // (c_i - u_i) / dt
};

struct ObservableRecord;

class LatticeState {
 public:
  double dx() const { return dx_; }
  double time() const { return static_cast<double>(steps_) * dx_; }
  std::size_t steps() const { return steps_; }
  std::size_t size() const { return current_.size(); }
  bool periodic() const { return periodic_; }
  double x_at(std::size_t i) const { return origin_ + static_cast<double>(i) * dx_; }
  double restitution() const { return restitution_; }
  ReflectionRule rule() const { return rule_; }
  std::optional<double> upper_obstacle() const { return upper_; }

  const std::vector<double>& current() const { return current_; }
  const std::vector<double>& previous() const { return previous_; }

  /// Valid index range [first, last] of the current level.
  std::size_t first_valid() const { return lo_; }
  std::size_t last_valid() const { return hi_; }

  const std::vector<ContactEvent>& events() const { return events_; }
  /// Time of the first reflected or unfolded update per node, NaN if none.
  const std::vector<double>& first_contact() const { return first_contact_; }

 private:
  friend LatticeState init(const InitialData&, double, const LatticeDomain&,
                           const LatticeOptions&);
  friend void step(LatticeState&);
  friend ObservableRecord observe(const LatticeState&);

  double dx_ = 0.0;
  double origin_ = 0.0;
  bool periodic_ = true;
  double restitution_ = 1.0;
  ReflectionRule rule_ = ReflectionRule::mirror;
  std::optional<double> upper_;
  std::size_t steps_ = 0;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  std::vector<double> current_;
  std::vector<double> previous_;
  std::vector<double> scratch_;
  // Per node: 0, or the obstacle (1 lower, 2 upper) it was folded about at
  // its last update.
  std::vector<std::uint8_t> side_;
  std::vector<std::uint8_t> side_prev_;
  std::vector<std::uint8_t> side_scratch_;
  std::vector<ContactEvent> events_;
  std::vector<double> first_contact_;
};

/// Samples u0 at the nodes and builds the ghost level. The upper obstacle 1
/// is active when data.mode is twin. Throws InputError for dx <= 0, h
/// outside [0, 1], a period that is not a multiple of dx, or data that is not
/// periodic with the requested period.
LatticeState init(const InitialData& data, double dx, const LatticeDomain& domain,
                  const LatticeOptions& options = {});

/// One step of size dt = dx. Throws EngineError when a candidate would
/// violate both obstacles in one step, and InputError past the exactness
/// horizon of a window.
void step(LatticeState& state);

struct ObservableRecord {
  double t = 0.0;
  double energy = 0.0;     // sum of (a^2 + b^2)/2 dx, see below
  double lip_minus = 0.0;  // max |b|, b ~ u_t - u_x
  double lip_plus = 0.0;   // max |a|, a ~ u_x + u_t
  double umax = 0.0;
  double umin = 0.0;
  std::size_t contacts = 0;  // cumulative event count
};

/// Discrete Riemann invariants on the diagonals between the two stored
/// levels: a_i = (u_{i+1} - u_i^prev)/dx and b_i = (u_i - u_{i+1}^prev)/dx.
/// The free update permutes them, so energy and both norms are exact
/// invariants away from contacts. A diagonal whose newer end was folded at
/// the last step while its older end was free is read with the newer end
/// unfolded, i.e. before the reflection.
ObservableRecord observe(const LatticeState& state);

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;  // valid nodes only
};

struct RunResult {
  std::vector<ObservableRecord> observables;
  std::vector<Snapshot> snapshots;
};

/// Steps until the grid time nearest to the absolute time T, recording
/// observables every `record_every` steps (and at the end). Each snapshot
/// time is taken at the nearest grid time.
RunResult run(LatticeState& state, double T, std::size_t record_every = 1,
              const std::vector<double>& snapshot_times = {});

Snapshot snapshot(const LatticeState& state);

void write_snapshot_csv(const Snapshot& snap, std::ostream& out);
void write_observables_csv(const std::vector<ObservableRecord>& records, std::ostream& out);
void write_events_csv(const std::vector<ContactEvent>& events, std::ostream& out);

}  // namespace obstacle
