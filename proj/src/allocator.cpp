#include "edgeprov/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace edgeprov {

DeviceState& ResourceState::device(std::string_view id) {
  for (DeviceState& d : devices) {
    if (d.id == id) return d;
  }
  throw DomainError("unknown device '" + std::string(id) + "' in resource state");
}

const DeviceState& ResourceState::device(std::string_view id) const {
  for (const DeviceState& d : devices) {
    if (d.id == id) return d;
  }
  throw DomainError("unknown device '" + std::string(id) + "' in resource state");
}

std::size_t ResourceState::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (devices[i].id == id) return i;
  }
  throw DomainError("unknown device '" + std::string(id) + "' in resource state");
}

void ResourceState::validate() const {
  for (const DeviceState& d : devices) {
    if (!d.residual.fits_within(d.capacity)) {
      throw InvariantError("resource state for '" + d.id + "' exceeds its capacity");
    }
  }
}

namespace {

// Mean consumed fraction over the four resource kinds, the per-slot resource
// loss of one placement on one device.
double normalized_load(const ResourceVector& amounts, const ResourceVector& capacity) {
  double sum = 0.0;
  for (ResourceKind kind : kResourceKinds) {
    sum += capacity[kind] > 0.0 ? amounts[kind] / capacity[kind] : 0.0;
  }
  return sum / static_cast<double>(kNumResourceKinds);
}

// Adjusts the last share so the left-to-right sum is exactly one.
void normalize_shares(std::vector<double>& shares) {
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < shares.size(); ++i) partial += shares[i];
  shares.back() = 1.0 - partial;
  for (int iteration = 0; iteration < 4; ++iteration) {
    double sum = 0.0;
    for (double s : shares) sum += s;
    if (sum == 1.0) return;
    shares.back() += 1.0 - sum;
  }
}

}  // namespace

AllocationScheme make_scheme(std::uint64_t request_id, const Service& service,
                             const ResourceState& state,
                             const std::vector<std::pair<std::string, double>>& device_weights) {
  if (device_weights.empty()) throw DomainError("a scheme needs at least one placement");

  std::vector<std::pair<std::string, double>> entries = device_weights;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double total_weight = 0.0;
  for (const auto& [id, weight] : entries) {
    if (weight < 0.0) throw DomainError("placement weight must be non-negative");
    total_weight += weight;
  }

  std::vector<double> shares(entries.size());
  if (total_weight > 0.0) {
    for (std::size_t i = 0; i < entries.size(); ++i) shares[i] = entries[i].second / total_weight;
  } else {
    std::fill(shares.begin(), shares.end(), 1.0 / static_cast<double>(entries.size()));
  }
  normalize_shares(shares);

  AllocationScheme scheme;
  scheme.request_id = request_id;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (shares[i] <= 0.0) continue;  // zero-weight device drops out of the split
    state.device(entries[i].first);  // existence check
    scheme.placements.push_back(
        Placement{entries[i].first, shares[i], service.amounts.scaled(shares[i])});
  }
  if (scheme.placements.empty()) throw DomainError("scheme has no positive share");
  if (scheme.placements.size() != entries.size()) {
    // Some device dropped out; renormalize over the survivors.
    std::vector<std::pair<std::string, double>> survivors;
    for (const Placement& p : scheme.placements) survivors.emplace_back(p.device, p.share);
    return make_scheme(request_id, service, state, survivors);
  }
  return scheme;
}

void validate_scheme(const AllocationScheme& scheme, const Service& service,
                     const ResourceState& state) {
  if (scheme.placements.empty()) throw InvariantError("scheme has no placements");

  std::set<std::string> seen;
  double share_sum = 0.0;
  for (const Placement& placement : scheme.placements) {
    if (!seen.insert(placement.device).second) {
      throw InvariantError("scheme places twice on device '" + placement.device + "'");
    }
    if (placement.share <= 0.0 || placement.share > 1.0) {
      throw InvariantError("placement share must be in (0, 1]");
    }
    share_sum += placement.share;
    if (placement.amounts != service.amounts.scaled(placement.share)) {
      throw InvariantError("placement amounts differ from the share-scaled service amounts");
    }
    const DeviceState& device = state.device(placement.device);
    if (!placement.amounts.fits_within(device.residual)) {
      throw InvariantError("placement on '" + placement.device +
                           "' does not fit the snapshot residuals");
    }
  }
  if (share_sum != 1.0) throw InvariantError("scheme shares must sum to exactly one");
}

std::vector<AllocationScheme> enumerate_candidates(std::uint64_t request_id,
                                                   const Service& service,
                                                   const ResourceState& state, int limit) {
  if (limit < 1) throw DomainError("candidate limit must be at least one");

  std::vector<AllocationScheme> out;
  auto push_unique = [&out](AllocationScheme scheme) {
    for (const AllocationScheme& existing : out) {
      if (existing.placements == scheme.placements) return;
    }
    out.push_back(std::move(scheme));
  };

  // Single-device schemes, device id ascending.
  std::vector<std::size_t> order(state.devices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state.devices[a].id < state.devices[b].id;
  });
  for (std::size_t index : order) {
    const DeviceState& device = state.devices[index];
    if (service.amounts.fits_within(device.residual)) {
      push_unique(make_scheme(request_id, service, state, {{device.id, 1.0}}));
    }
  }

  // Proportional splits over the top-m devices by residual processing.
  std::vector<std::size_t> by_processing(state.devices.size());
  std::iota(by_processing.begin(), by_processing.end(), 0);
  std::sort(by_processing.begin(), by_processing.end(), [&](std::size_t a, std::size_t b) {
    const double pa = state.devices[a].residual.processing();
    const double pb = state.devices[b].residual.processing();
    if (pa != pb) return pa > pb;
    return state.devices[a].id < state.devices[b].id;
  });

  const std::size_t max_m =
      std::min<std::size_t>(static_cast<std::size_t>(limit), state.devices.size());
  for (std::size_t m = 2; m <= max_m; ++m) {
    std::vector<std::pair<std::string, double>> weights;
    for (std::size_t i = 0; i < m; ++i) {
      const DeviceState& device = state.devices[by_processing[i]];
      weights.emplace_back(device.id, device.residual.processing());
    }
    AllocationScheme scheme;
    try {
      scheme = make_scheme(request_id, service, state, weights);
    } catch (const DomainError&) {
      continue;  // all weights zero share collapsed
    }
    bool feasible = true;
    for (const Placement& placement : scheme.placements) {
      if (!placement.amounts.fits_within(state.device(placement.device).residual)) {
        feasible = false;
        break;
      }
    }
    if (feasible) push_unique(std::move(scheme));
  }
  return out;
}

SchemeEvaluation evaluate_scheme(const AllocationScheme& scheme, const ResourceState& state,
                                 const EvaluationContext& context) {
  if (context.service == nullptr || context.request == nullptr || context.channel == nullptr) {
    throw DomainError("evaluation context is incomplete");
  }
  if (context.z.size() != state.devices.size() || context.p_avg.size() != state.devices.size()) {
    throw DomainError("evaluation context vectors must match the device count");
  }
  validate_scheme(scheme, *context.service, state);

  const Request& request = *context.request;
  const int write_index = request.needs_write ? 1 : 0;
  const int read_index = request.needs_read ? 1 : 0;

  SchemeEvaluation eval;
  double max_processing = 0.0;
  double max_storage = 0.0;
  std::vector<double> z_used;
  z_used.reserve(scheme.placements.size());
  for (const Placement& placement : scheme.placements) {
    const DeviceState& device = state.device(placement.device);
    const double subtask_bytes = request.data_size * placement.share;
    max_processing =
        std::max(max_processing, local_processing_delay(subtask_bytes, device.compute_rate));
    max_storage =
        std::max(max_storage, storage_delay(subtask_bytes, write_index, read_index,
                                            device.write_speed, device.read_speed));

    const std::size_t device_index = state.index_of(placement.device);
    const double load = normalized_load(placement.amounts, device.capacity);
    eval.outcome.y0 += load;
    eval.outcome.device_penalties.push_back(penalty(load, context.p_avg[device_index]));
    z_used.push_back(context.z[device_index]);
  }

  // Both request and response legs cross the same uplink.
  std::vector<std::size_t> interferers(context.channel->users.size());
  std::iota(interferers.begin(), interferers.end(), 0);
  const double rate = link_rate(*context.channel, static_cast<std::size_t>(request.user),
                                context.node_index, interferers);
  const double request_leg = transmission_delay(request.data_size * 8.0, rate);
  const double response_leg =
      transmission_delay(context.response_fraction * request.data_size * 8.0, rate);

  eval.predicted.transmission = request_leg + response_leg;
  eval.predicted.processing = max_processing;
  eval.predicted.storage = max_storage;
  eval.predicted.waiting =
      static_cast<double>(context.current_slot - request.arrival_slot) * context.slot_length;

  const double busy = max_processing + max_storage;
  eval.duration_slots =
      std::max<long>(1, static_cast<long>(std::ceil(busy / context.slot_length)));

  eval.outcome.arrivals = context.arrivals;
  eval.outcome.services = 1.0 / static_cast<double>(eval.duration_slots);

  const double qs[1] = {context.queue};
  const double as[1] = {eval.outcome.arrivals};
  const double bs[1] = {eval.outcome.services};
  eval.objective = dpp_objective(context.v, eval.outcome.y0, qs, as, bs, z_used,
                                 eval.outcome.device_penalties);
  return eval;
}

Selection select_scheme(const std::vector<AllocationScheme>& candidates,
                        const ResourceState& state, const EvaluationContext& context,
                        double c_bound) {
  if (candidates.empty()) throw DomainError("no candidate schemes to select from");
  if (c_bound < 0.0) throw DomainError("the C bound must be non-negative");

  Selection best;
  bool have_best = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    SchemeEvaluation eval = evaluate_scheme(candidates[i], state, context);
    const bool better = [&] {
      if (!have_best) return true;
      if (eval.objective != best.evaluation.objective) {
        return eval.objective < best.evaluation.objective;
      }
      const auto size_new = candidates[i].placements.size();
      const auto size_best = candidates[best.index].placements.size();
      if (size_new != size_best) return size_new < size_best;
      return candidates[i].placements.front().device <
             candidates[best.index].placements.front().device;
    }();
    if (better) {
      best.index = i;
      best.evaluation = std::move(eval);
      have_best = true;
    }
  }
  return best;
}

std::string scheme_container_id(const AllocationScheme& scheme, std::size_t index) {
  return "c" + std::to_string(scheme.request_id) + "." + std::to_string(index);
}

void complete_subtasks(const AllocationScheme& scheme, EdgeNode& node) {
  for (std::size_t i = 0; i < scheme.placements.size(); ++i) {
    node.device(scheme.placements[i].device).remove_container(scheme_container_id(scheme, i));
  }
}

Supervisor::Supervisor(EdgeNode& node, std::vector<Service> services, ChannelSpec channel,
                       SupervisorOptions options)
    : node_(node),
      services_(std::move(services)),
      channel_(std::move(channel)),
      options_(std::move(options)),
      registry_(options_.registry_max_age) {
  channel_.validate();
  if (options_.p_avg.empty()) {
    options_.p_avg.assign(node_.devices().size(), 0.0);
  }
  if (options_.p_avg.size() != node_.devices().size()) {
    throw ConfigError("p_avg must provide one budget per device");
  }
  // The supervisor knows the static device properties from registration; the
  // initial resource state is the full capacities.
  for (const EdgeDevice& device : node_.devices()) {
    registry_.track(device.id());
    state_.devices.push_back(DeviceState{device.id(), device.capacity(), device.capacity(),
                                         device.compute_rate(), device.read_speed(),
                                         device.write_speed(), 0});
  }
}

const Service& Supervisor::service(std::string_view id) const {
  for (const Service& service : services_) {
    if (service.id == id) return service;
  }
  throw ConfigError("unknown service '" + std::string(id) + "'");
}

EvaluationContext Supervisor::make_context(const Request& request, long slot, double queue,
                                           double arrivals,
                                           const std::vector<double>& z) const {
  EvaluationContext context;
  context.service = &service(request.service);
  context.request = &request;
  context.channel = &channel_;
  context.node_index = options_.node_index;
  context.v = options_.v;
  context.slot_length = options_.slot_length;
  context.response_fraction = options_.response_fraction;
  context.current_slot = slot;
  context.queue = queue;
  context.arrivals = arrivals;
  context.z = z.empty() ? std::vector<double>(state_.devices.size(), 0.0) : z;
  context.p_avg = options_.p_avg;
  return context;
}

bool Supervisor::place(const AllocationScheme& scheme, const Service& service, long slot) {
  std::vector<std::size_t> created;
  for (std::size_t i = 0; i < scheme.placements.size(); ++i) {
    const Placement& placement = scheme.placements[i];
    try {
      node_.device(placement.device)
          .add_container(Container{scheme_container_id(scheme, i), service.id,
                                   placement.amounts, placement.share, slot});
      created.push_back(i);
    } catch (const InvariantError&) {
      // The snapshot overstated what the device can hold; roll back.
      for (std::size_t j : created) {
        node_.device(scheme.placements[j].device)
            .remove_container(scheme_container_id(scheme, j));
      }
      ++overcommit_rejections_;
      return false;
    }
  }
  for (const Placement& placement : scheme.placements) {
    DeviceState& device = state_.device(placement.device);
    device.residual = device.residual - placement.amounts;
  }
  return true;
}

Decision Supervisor::handle_request(std::uint64_t request_id, const Request& request,
                                    long slot, double queue, double arrivals,
                                    const std::vector<double>& z) {
  request.validate();
  const Service& svc = service(request.service);
  EvaluationContext context = make_context(request, slot, queue, arrivals, z);

  // Fast path: a device with free resources for the whole request takes it
  // without recomputing the allocation scheme.
  std::vector<std::size_t> order(state_.devices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state_.devices[a].id < state_.devices[b].id;
  });
  for (std::size_t index : order) {
    const DeviceState& device = state_.devices[index];
    if (!svc.amounts.fits_within(device.residual)) continue;
    AllocationScheme scheme = make_scheme(request_id, svc, state_, {{device.id, 1.0}});
    SchemeEvaluation eval = evaluate_scheme(scheme, state_, context);
    if (!place(scheme, svc, slot)) {
      Decision rejected;
      rejected.kind = Decision::Kind::Deferred;
      rejected.defer_reason = Decision::DeferReason::Overcommit;
      return rejected;
    }
    Decision decision;
    decision.kind = Decision::Kind::Direct;
    decision.scheme = std::move(scheme);
    decision.predicted = eval.predicted;
    decision.duration_slots = eval.duration_slots;
    return decision;
  }

  // Optimization path: enumerate, keep candidates that can still meet the
  // timeout, then take the objective minimizer.
  const std::vector<AllocationScheme> candidates =
      enumerate_candidates(request_id, svc, state_, options_.candidate_limit);
  if (candidates.empty()) {
    Decision decision;
    decision.defer_reason = Decision::DeferReason::NoCandidates;
    return decision;
  }

  const double timeout_seconds =
      static_cast<double>(request.timeout_slots) * options_.slot_length;
  std::vector<AllocationScheme> viable;
  for (const AllocationScheme& candidate : candidates) {
    const SchemeEvaluation eval = evaluate_scheme(candidate, state_, context);
    if (edge_total_delay(eval.predicted) <= timeout_seconds) viable.push_back(candidate);
  }
  if (viable.empty()) {
    Decision decision;
    decision.defer_reason = Decision::DeferReason::TimedOutCandidates;
    return decision;
  }

  Selection selection = select_scheme(viable, state_, context, options_.c_bound);
  AllocationScheme chosen = viable[selection.index];
  if (!place(chosen, svc, slot)) {
    Decision rejected;
    rejected.defer_reason = Decision::DeferReason::Overcommit;
    return rejected;
  }
  Decision decision;
  decision.kind = Decision::Kind::Scheduled;
  decision.scheme = std::move(chosen);
  decision.predicted = selection.evaluation.predicted;
  decision.duration_slots = selection.evaluation.duration_slots;
  return decision;
}

Decision Supervisor::handle_request_greedy(std::uint64_t request_id, const Request& request,
                                           long slot) {
  request.validate();
  const Service& svc = service(request.service);

  const DeviceState* best = nullptr;
  for (const DeviceState& device : state_.devices) {
    if (!svc.amounts.fits_within(device.residual)) continue;
    if (best == nullptr || device.residual.processing() > best->residual.processing() ||
        (device.residual.processing() == best->residual.processing() &&
         device.id < best->id)) {
      best = &device;
    }
  }
  if (best == nullptr) {
    Decision decision;
    decision.defer_reason = Decision::DeferReason::NoCandidates;
    return decision;
  }

  AllocationScheme scheme = make_scheme(request_id, svc, state_, {{best->id, 1.0}});
  EvaluationContext context = make_context(request, slot, 0.0, 0.0, {});
  context.v = 0.0;  // the greedy baseline has no tradeoff parameter
  SchemeEvaluation eval = evaluate_scheme(scheme, state_, context);
  if (!place(scheme, svc, slot)) {
    Decision rejected;
    rejected.defer_reason = Decision::DeferReason::Overcommit;
    return rejected;
  }
  Decision decision;
  decision.kind = Decision::Kind::Direct;
  decision.scheme = std::move(scheme);
  decision.predicted = eval.predicted;
  decision.duration_slots = eval.duration_slots;
  return decision;
}

void Supervisor::complete(const AllocationScheme& scheme) {
  complete_subtasks(scheme, node_);
  for (const Placement& placement : scheme.placements) {
    DeviceState& device = state_.device(placement.device);
    ResourceVector restored = device.residual + placement.amounts;
    // Snapshots taken while the containers ran already include their load;
    // restoring on top of such a snapshot saturates at the capacity.
    if (!restored.fits_within(device.capacity)) {
      double clamped[kNumResourceKinds];
      for (ResourceKind kind : kResourceKinds) {
        clamped[static_cast<std::size_t>(kind)] =
            std::min(restored[kind], device.capacity[kind]);
      }
      restored = ResourceVector(clamped[0], clamped[1], clamped[2], clamped[3]);
    }
    device.residual = restored;
  }
}

void Supervisor::refresh_device(const std::string& device_id, long slot) {
  const ResourceDescriptor descriptor =
      registry_.supervisor_query(node_.device(device_id), slot);
  DeviceState& device = state_.device(device_id);
  const double processing_available =
      static_cast<double>(descriptor.cpu.frequency_hz) * descriptor.cpu.cores *
      (1.0 - descriptor.cpu.usage);
  device.residual = ResourceVector(
      std::max(0.0, processing_available), static_cast<double>(descriptor.storage.available_bytes),
      static_cast<double>(descriptor.memory.available_bytes),
      static_cast<double>(descriptor.network.available_bps));
  device.snapshot_slot = slot;
  state_.validate();
}

void Supervisor::refresh_all(long slot) {
  for (const EdgeDevice& device : node_.devices()) refresh_device(device.id(), slot);
}

}  // namespace edgeprov
