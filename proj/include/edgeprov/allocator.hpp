#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeprov/delay.hpp"
#include "edgeprov/domain.hpp"
#include "edgeprov/queueing.hpp"
#include "edgeprov/resource_repr.hpp"

namespace edgeprov {

/// The supervisor's view of one device: residual resources from the last
/// snapshot or bookkeeping update, plus the static properties needed to
/// predict delays.
struct DeviceState {
  std::string id;
  ResourceVector residual;
  ResourceVector capacity;
  double compute_rate = 0.0;
  double read_speed = 0.0;
  double write_speed = 0.0;
  long snapshot_slot = 0;
};

/// The resource state the allocator scores candidate schemes against.
struct ResourceState {
  std::vector<DeviceState> devices;

  DeviceState& device(std::string_view id);
  const DeviceState& device(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  void validate() const;  // residuals never exceed capacities
};

/// One subtask placement: a device, the share of the request it takes and
/// the resources its container will consume.
struct Placement {
  std::string device;
  double share = 1.0;
  ResourceVector amounts;
};

/// A candidate placement of one request's subtasks across devices. Shares
/// sum to exactly one; amounts are the service amounts scaled by each share.
struct AllocationScheme {
  std::uint64_t request_id = 0;
  std::vector<Placement> placements;

  bool operator==(const AllocationScheme&) const = default;
};

/// Per-request inputs for scoring a scheme.
struct EvaluationContext {
  const Service* service = nullptr;
  const Request* request = nullptr;
  const ChannelSpec* channel = nullptr;
  std::size_t node_index = 0;
  double v = 0.0;
  double slot_length = 1.0;
  double response_fraction = 0.05;
  long current_slot = 0;
  double queue = 0.0;                // Q_i(t) of the node
  double arrivals = 0.0;             // a_i(t) of the slot
  std::vector<double> z;             // Z_k(t), aligned with ResourceState devices
  std::vector<double> p_avg;         // per device, same alignment
};

/// The result of scoring one scheme.
struct SchemeEvaluation {
  SlotOutcome outcome;       // predicted a, b, y0 and per-placement penalties
  DelayBreakdown predicted;  // transmission, storage, processing, waiting so far
  double objective = 0.0;
  long duration_slots = 1;   // container occupancy if the scheme is placed
};

/// What the allocator decided for one request.
struct Decision {
  enum class Kind { Direct, Scheduled, Deferred };
  enum class DeferReason { None, NoCandidates, TimedOutCandidates, Overcommit };

  Kind kind = Kind::Deferred;
  DeferReason defer_reason = DeferReason::None;
  AllocationScheme scheme;       // valid for Direct and Scheduled
  DelayBreakdown predicted;      // valid for Direct and Scheduled
  long duration_slots = 0;       // valid for Direct and Scheduled
};

/// Builds a scheme over the given devices with shares proportional to the
/// weights (equal shares when all weights are zero). Shares are normalized
/// so they sum to exactly one; placements are ordered by device id.
AllocationScheme make_scheme(std::uint64_t request_id, const Service& service,
                             const ResourceState& state,
                             const std::vector<std::pair<std::string, double>>& device_weights);

/// Checks the scheme invariants against the scoring snapshot; throws
/// InvariantError with context on violation.
void validate_scheme(const AllocationScheme& scheme, const Service& service,
                     const ResourceState& state);

/// All feasible single-device schemes (device id ascending), plus
/// proportional splits across the top-m devices by residual processing for
/// m = 2..min(limit, device count). Deduplicated; deterministic order.
/// Returns an empty list when nothing is feasible.
std::vector<AllocationScheme> enumerate_candidates(std::uint64_t request_id,
                                                   const Service& service,
                                                   const ResourceState& state, int limit);

/// Scores a feasible scheme: predicted delays, the service completions it
/// enables this slot, the normalized resource penalties and the
/// drift-plus-penalty objective.
SchemeEvaluation evaluate_scheme(const AllocationScheme& scheme, const ResourceState& state,
                                 const EvaluationContext& context);

/// Picks the objective minimizer; ties break on fewer placements, then the
/// lowest first device id. `c_bound` is the accepted distance from the
/// minimum; the returned scheme always attains the minimum itself, so any
/// c_bound >= 0 is satisfied.
struct Selection {
  std::size_t index = 0;
  SchemeEvaluation evaluation;
};
Selection select_scheme(const std::vector<AllocationScheme>& candidates,
                        const ResourceState& state, const EvaluationContext& context,
                        double c_bound = 0.0);

/// Removes all containers the scheme created and returns their consumption
/// to the devices. Throws InvariantError when a container is already gone.
void complete_subtasks(const AllocationScheme& scheme, EdgeNode& node);

/// Container id used for placement `index` of the scheme.
std::string scheme_container_id(const AllocationScheme& scheme, std::size_t index);

struct SupervisorOptions {
  double v = 10.0;
  double c_bound = 0.0;
  int candidate_limit = 8;
  double slot_length = 1.0;
  double response_fraction = 0.05;
  std::vector<double> p_avg;       // per device, node order
  std::size_t node_index = 0;
  long registry_max_age = 1;
};

/// The edge node supervisor: keeps the descriptor registry and the resource
/// state, runs the allocation flow for each request and manages container
/// lifecycle. One instance per node; not thread-safe across nodes' slots.
class Supervisor {
public:
  Supervisor(EdgeNode& node, std::vector<Service> services, ChannelSpec channel,
             SupervisorOptions options);

  /// The allocation flow: place the whole request on the first device with
  /// enough free resources; otherwise enumerate candidate schemes, drop the
  /// ones whose predicted delay exceeds the request timeout, and take the
  /// objective minimizer. Returns Deferred when nothing survives.
  Decision handle_request(std::uint64_t request_id, const Request& request, long slot,
                          double queue, double arrivals, const std::vector<double>& z);

  /// Baseline decision rule: the device with the largest residual
  /// processing that fits the whole request; no splitting, no queue terms.
  Decision handle_request_greedy(std::uint64_t request_id, const Request& request, long slot);

  /// Destroys the scheme's containers and restores the bookkept residuals.
  void complete(const AllocationScheme& scheme);

  /// Refreshes the resource state of one device (or all) from a descriptor
  /// exchange.
  void refresh_device(const std::string& device_id, long slot);
  void refresh_all(long slot);

  const ResourceState& state() const noexcept { return state_; }
  Registry& registry() noexcept { return registry_; }
  EdgeNode& node() noexcept { return node_; }
  const SupervisorOptions& options() const noexcept { return options_; }
  const Service& service(std::string_view id) const;
  const ChannelSpec& channel() const noexcept { return channel_; }

  long overcommit_rejections() const noexcept { return overcommit_rejections_; }

  EvaluationContext make_context(const Request& request, long slot, double queue,
                                 double arrivals, const std::vector<double>& z) const;

private:
  /// Instantiates the scheme's containers on the real devices, updating the
  /// bookkept residuals. Rolls back and reports overcommit on rejection.
  bool place(const AllocationScheme& scheme, const Service& service, long slot);

  EdgeNode& node_;
  std::vector<Service> services_;
  ChannelSpec channel_;
  SupervisorOptions options_;
  Registry registry_;
  ResourceState state_;
  long overcommit_rejections_ = 0;
};

}  // namespace edgeprov
