#include "edgeprov/sim.hpp"

#include <algorithm>
#include <deque>

#include "edgeprov/queueing.hpp"
#include "edgeprov/rng.hpp"

namespace edgeprov {

const char* to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::Lrr: return "lrr";
    case PolicyKind::LyapunovOnly: return "lyapunov-only";
    case PolicyKind::EverySlot: return "every-slot";
    case PolicyKind::GreedyMatch: return "greedy-match";
  }
  return "unknown";
}

PolicyKind policy_from_string(std::string_view name) {
  if (name == "lrr") return PolicyKind::Lrr;
  if (name == "lyapunov-only") return PolicyKind::LyapunovOnly;
  if (name == "every-slot") return PolicyKind::EverySlot;
  if (name == "greedy-match") return PolicyKind::GreedyMatch;
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected lrr, lyapunov-only, every-slot or greedy-match)");
}

const char* to_string(LoadSemantics semantics) {
  return semantics == LoadSemantics::Consumed ? "consumed" : "paper-verbatim";
}

LoadSemantics load_semantics_from_string(std::string_view name) {
  if (name == "consumed") return LoadSemantics::Consumed;
  if (name == "paper-verbatim") return LoadSemantics::PaperVerbatim;
  throw ConfigError("unknown load semantics '" + std::string(name) +
                    "' (expected consumed or paper-verbatim)");
}

void SimConfig::validate() const {
  if (slots < 1) throw ConfigError("slots must be at least 1");
  if (arrival_rate < 0.0) throw ConfigError("arrival rate must be non-negative");
  if (v < 0.0) throw ConfigError("V must be non-negative");
  if (rate_norm < 0.0 || rate_norm > 1.0) throw ConfigError("rate_norm must be in [0, 1]");
  if (rate_th < 0.0 || rate_th > 1.0) throw ConfigError("rate_th must be in [0, 1]");
  if (!(slot_length > 0.0)) throw ConfigError("slot length must be positive");
  if (devices.empty()) throw ConfigError("at least one device is required");
  if (services.empty()) throw ConfigError("at least one service is required");
  if (candidate_limit < 1) throw ConfigError("candidate limit must be at least 1");
  if (c_bound < 0.0) throw ConfigError("C must be non-negative");
  if (response_fraction < 0.0) throw ConfigError("response fraction must be non-negative");
  if (p_avg < 0.0) throw ConfigError("p_avg must be non-negative");
  if (requests.data_min <= 0.0 || requests.data_max < requests.data_min) {
    throw ConfigError("request data size range is invalid");
  }
  if (requests.timeout_min < 1 || requests.timeout_max < requests.timeout_min) {
    throw ConfigError("request timeout range is invalid");
  }
  if (requests.p_read < 0.0 || requests.p_read > 1.0 || requests.p_write < 0.0 ||
      requests.p_write > 1.0) {
    throw ConfigError("request read/write probabilities must be in [0, 1]");
  }
  if (channel.users.empty()) throw ConfigError("the channel needs at least one user");
  channel.validate();
  for (const ChannelUser& user : channel.users) {
    if (user.gains.empty()) throw ConfigError("every channel user needs a gain entry");
  }
  for (const BackgroundLoad& load : background_loads) {
    if (load.end_slot < load.start_slot) throw ConfigError("background load window is inverted");
    const bool known = std::any_of(devices.begin(), devices.end(),
                                   [&](const DeviceSpec& d) { return d.id == load.device; });
    if (!known) throw ConfigError("background load names unknown device '" + load.device + "'");
  }
  if (stability_epsilon < 0.0) throw ConfigError("stability epsilon must be non-negative");
}

std::vector<std::vector<Request>> generate_arrivals(double arrival_rate, std::uint64_t seed,
                                                    long slots, const RequestProfile& profile,
                                                    const std::vector<Service>& services,
                                                    std::size_t users) {
  if (arrival_rate < 0.0) throw DomainError("arrival rate must be non-negative");
  if (slots < 0) throw DomainError("slot count must be non-negative");
  if (services.empty()) throw DomainError("arrival generation needs at least one service");
  if (users == 0) throw DomainError("arrival generation needs at least one user");

  Rng rng(Rng::mix(seed, 0x61727276ULL));  // arrivals stream
  std::vector<std::vector<Request>> batches(static_cast<std::size_t>(slots));
  std::uint64_t user_counter = 0;
  for (long t = 0; t < slots; ++t) {
    const long count = rng.poisson(arrival_rate);
    auto& batch = batches[static_cast<std::size_t>(t)];
    batch.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      Request request;
      request.user = static_cast<int>(user_counter++ % users);
      request.data_size = rng.uniform(profile.data_min, profile.data_max);
      request.service = services[rng.below(services.size())].id;
      request.timeout_slots =
          static_cast<int>(rng.uniform_int(profile.timeout_min, profile.timeout_max));
      request.needs_read = rng.bernoulli(profile.p_read);
      request.needs_write = rng.bernoulli(profile.p_write);
      request.arrival_slot = t;
      batch.push_back(std::move(request));
    }
  }
  return batches;
}

namespace {

struct PendingRequest {
  std::uint64_t id = 0;
  Request request;
};

struct ActiveRequest {
  std::uint64_t id = 0;
  AllocationScheme scheme;
  DelayBreakdown breakdown;
  long completes_at = 0;
};

double mean_kind_fraction(const EdgeDevice& device) {
  const ResourceVector used = device.consumption_total();
  double sum = 0.0;
  for (ResourceKind kind : kResourceKinds) {
    const double cap = device.capacity()[kind];
    sum += cap > 0.0 ? used[kind] / cap : 0.0;
  }
  return sum / static_cast<double>(kNumResourceKinds);
}

}  // namespace

Metrics run(const SimConfig& config) {
  config.validate();

  std::vector<EdgeDevice> devices;
  devices.reserve(config.devices.size());
  for (const DeviceSpec& spec : config.devices) {
    devices.emplace_back(spec.id, spec.capacity, spec.write_speed, spec.read_speed,
                         spec.compute_rate, spec.cores, spec.family, spec.architecture);
  }
  EdgeNode node("en0", std::move(devices));
  const std::size_t device_count = node.devices().size();

  SupervisorOptions options;
  options.v = config.v;
  options.c_bound = config.c_bound;
  options.candidate_limit = config.candidate_limit;
  options.slot_length = config.slot_length;
  options.response_fraction = config.response_fraction;
  options.p_avg.assign(device_count, config.p_avg);
  Supervisor supervisor(node, config.services, config.channel, options);

  LoadParams load_params;
  load_params.rate_norm = config.rate_norm;
  load_params.rate_th = config.rate_th;
  load_params.semantics = config.load_semantics;

  const auto batches =
      generate_arrivals(config.arrival_rate, config.seed, config.slots, config.requests,
                        config.services, config.channel.users.size());

  const double y0_upper =
      config.y0_max >= 0.0 ? config.y0_max : static_cast<double>(device_count);

  Metrics metrics;
  for (const EdgeDevice& device : node.devices()) metrics.device_ids.push_back(device.id());
  metrics.z_series.assign(device_count, {});
  metrics.slots.reserve(static_cast<std::size_t>(config.slots));

  std::deque<PendingRequest> pending;
  std::vector<ActiveRequest> active;
  std::vector<double> z(device_count, 0.0);
  double queue = 0.0;
  std::uint64_t next_request_id = 1;
  double latency_sum = 0.0;

  for (long t = 0; t < config.slots; ++t) {
    const auto& batch = batches[static_cast<std::size_t>(t)];

    // Exogenous load enters and leaves the real devices unannounced.
    for (std::size_t i = 0; i < config.background_loads.size(); ++i) {
      const BackgroundLoad& load = config.background_loads[i];
      if (load.start_slot == t && load.end_slot > t) {
        node.device(load.device).add_container(
            Container{"bg" + std::to_string(i), "background", load.amounts, 1.0, t});
      }
      if (load.end_slot == t && load.start_slot < t) {
        node.device(load.device).remove_container("bg" + std::to_string(i));
      }
    }

    const bool work_present = !pending.empty() || !batch.empty();

    // Reallocation policy: decide whether the resource state is refreshed.
    int realloc_event = 0;
    switch (config.policy) {
      case PolicyKind::Lrr: {
        const auto fired = scan(node, load_params);
        for (const std::string& id : fired) supervisor.refresh_device(id, t);
        realloc_event = (!fired.empty() && work_present) ? 1 : 0;
        break;
      }
      case PolicyKind::LyapunovOnly: {
        // Same trigger, but the resource state never sees a descriptor.
        const auto fired = scan(node, load_params);
        realloc_event = (!fired.empty() && work_present) ? 1 : 0;
        break;
      }
      case PolicyKind::EverySlot:
      case PolicyKind::GreedyMatch: {
        if (work_present) supervisor.refresh_all(t);
        realloc_event = work_present ? 1 : 0;
        break;
      }
    }

    const double arrivals = static_cast<double>(batch.size());
    metrics.arrivals_total += static_cast<long>(batch.size());
    const double waiting_backlog = static_cast<double>(pending.size() + batch.size());

    // Dispatch: deferred requests retry first, then the new arrivals.
    std::deque<PendingRequest> to_dispatch = std::move(pending);
    pending.clear();
    for (const Request& request : batch) {
      to_dispatch.push_back(PendingRequest{next_request_id++, request});
    }

    std::deque<PendingRequest> still_waiting;
    for (PendingRequest& item : to_dispatch) {
      Decision decision;
      if (config.policy == PolicyKind::GreedyMatch) {
        decision = supervisor.handle_request_greedy(item.id, item.request, t);
      } else {
        decision = supervisor.handle_request(item.id, item.request, t, queue, arrivals, z);
      }
      if (decision.kind == Decision::Kind::Deferred) {
        still_waiting.push_back(std::move(item));
      } else {
        active.push_back(ActiveRequest{item.id, std::move(decision.scheme),
                                       decision.predicted,
                                       t + decision.duration_slots - 1});
      }
    }

    // Completions land in the slot the latest-finishing subtask ends.
    double completions = 0.0;
    for (auto it = active.begin(); it != active.end();) {
      if (it->completes_at == t) {
        supervisor.complete(it->scheme);
        latency_sum += edge_total_delay(it->breakdown);
        ++metrics.completed;
        completions += 1.0;
        it = active.erase(it);
      } else {
        ++it;
      }
    }

    // Waiting requests whose patience ran out leave the queue.
    double drops = 0.0;
    for (auto it = still_waiting.begin(); it != still_waiting.end();) {
      if (t - it->request.arrival_slot >= it->request.timeout_slots) {
        drops += 1.0;
        ++metrics.timeout_drops;
        it = still_waiting.erase(it);
      } else {
        ++it;
      }
    }
    pending = std::move(still_waiting);

    // Slot-level resource loss: mean consumed fraction per device.
    SlotRecord record;
    record.slot = t;
    record.queue = queue;
    record.arrivals = arrivals;
    record.completions = completions;
    record.drops = drops;
    record.departures = completions + drops;
    record.waiting_backlog = waiting_backlog;
    record.realloc_event = realloc_event;
    record.utilization.reserve(device_count * kNumResourceKinds);
    std::vector<double> penalties(device_count, 0.0);
    for (std::size_t k = 0; k < device_count; ++k) {
      const EdgeDevice& device = node.devices()[k];
      if (!validate_capacity(device)) {
        throw InvariantError("capacity constraint broken on '" + device.id() + "'");
      }
      const ResourceVector used = device.consumption_total();
      for (ResourceKind kind : kResourceKinds) {
        const double cap = device.capacity()[kind];
        record.utilization.push_back(cap > 0.0 ? used[kind] / cap : 0.0);
      }
      const double p_k = mean_kind_fraction(device);
      record.y0 += p_k;
      penalties[k] = penalty(p_k, config.p_avg);
      metrics.z_series[k].push_back(z[k]);
    }
    if (record.y0 < config.y0_min - 1e-12 || record.y0 > y0_upper + 1e-12) {
      throw InvariantError("slot penalty y0 left its configured bounds");
    }
    metrics.slots.push_back(std::move(record));

    // Advance the actual and virtual queues.
    queue = queue_step(queue, arrivals, completions + drops);
    for (std::size_t k = 0; k < device_count; ++k) {
      z[k] = virtual_queue_step(z[k], penalties[k]);
    }
  }

  metrics.reallocations = 0;
  for (const SlotRecord& record : metrics.slots) metrics.reallocations += record.realloc_event;
  metrics.pending_at_end = static_cast<long>(pending.size() + active.size());
  metrics.overcommit_rejections = supervisor.overcommit_rejections();

  if (metrics.completed + metrics.timeout_drops + metrics.pending_at_end !=
      metrics.arrivals_total) {
    throw InvariantError("request accounting does not add up at run end");
  }

  std::vector<double> queue_series, y0_series, backlog_series;
  queue_series.reserve(metrics.slots.size());
  for (const SlotRecord& record : metrics.slots) {
    queue_series.push_back(record.queue);
    y0_series.push_back(record.y0);
    backlog_series.push_back(record.waiting_backlog);
  }
  metrics.avg_queue = time_average(queue_series);
  metrics.y0_time_average = time_average(y0_series);
  metrics.avg_latency_s =
      metrics.completed > 0 ? latency_sum / static_cast<double>(metrics.completed) : 0.0;

  if (config.delta_tout >= 0.0) {
    metrics.delta_tout_used = config.delta_tout;
  } else {
    // The timeout expressed in expected-service slots: how much backlog a
    // request can tolerate at the observed completion rate.
    const double mean_timeout =
        0.5 * (config.requests.timeout_min + config.requests.timeout_max);
    const double completion_rate =
        static_cast<double>(metrics.completed) / static_cast<double>(config.slots);
    metrics.delta_tout_used = mean_timeout * completion_rate;
  }
  metrics.tail_violation = tail_violation_rate(backlog_series, metrics.delta_tout_used);

  metrics.avg_utilization.assign(device_count, {});
  for (const SlotRecord& record : metrics.slots) {
    for (std::size_t k = 0; k < device_count; ++k) {
      for (std::size_t kind = 0; kind < kNumResourceKinds; ++kind) {
        metrics.avg_utilization[k][kind] += record.utilization[k * kNumResourceKinds + kind];
      }
    }
  }
  for (auto& utilization : metrics.avg_utilization) {
    for (double& value : utilization) value /= static_cast<double>(metrics.slots.size());
  }

  metrics.z_stable.assign(device_count, true);
  if (config.slots >= 2) {
    for (std::size_t k = 0; k < device_count; ++k) {
      metrics.z_stable[k] = stability_check(metrics.z_series[k], config.stability_epsilon);
    }
  }
  return metrics;
}

}  // namespace edgeprov
