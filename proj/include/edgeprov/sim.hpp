#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edgeprov/allocator.hpp"
#include "edgeprov/delay.hpp"
#include "edgeprov/domain.hpp"
#include "edgeprov/realloc_policy.hpp"

namespace edgeprov {

/// The provisioning policies the engine can drive each slot.
///  - Lrr: threshold-triggered descriptor refresh + drift-plus-penalty choice.
///  - LyapunovOnly: same objective and trigger, but the resource state is
///    maintained purely from the supervisor's own placement bookkeeping.
///  - EverySlot: refresh and recompute whenever there is work, every slot.
///  - GreedyMatch: refresh every slot, place whole requests on the device
///    with the most residual processing; queue-unaware.
enum class PolicyKind {
  Lrr,
  LyapunovOnly,
  EverySlot,
  GreedyMatch,
};

const char* to_string(PolicyKind policy);
PolicyKind policy_from_string(std::string_view name);
const char* to_string(LoadSemantics semantics);
LoadSemantics load_semantics_from_string(std::string_view name);

/// Static description of one device used to build the node.
struct DeviceSpec {
  std::string id;
  ResourceVector capacity;
  double write_speed = 1.0;
  double read_speed = 1.0;
  double compute_rate = 1.0;
  int cores = 1;
  std::string family = "generic";
  std::string architecture = "x86_64";
};

/// Distributions the request attributes are drawn from.
struct RequestProfile {
  double data_min = 4e6;   // bytes
  double data_max = 1.6e7;
  int timeout_min = 60;    // slots
  int timeout_max = 120;
  double p_read = 0.5;
  double p_write = 1.0;
};

/// Exogenous consumption injected on a device for a window of slots; visible
/// to the supervisor only through descriptor refreshes.
struct BackgroundLoad {
  std::string device;
  long start_slot = 0;
  long end_slot = 0;  // exclusive
  ResourceVector amounts;
};

struct SimConfig {
  long slots = 1000;
  std::uint64_t seed = 1;
  double arrival_rate = 1.0;  // requests per slot
  double v = 10.0;
  double rate_norm = 0.8;
  double rate_th = 0.5;
  double slot_length = 0.02;  // seconds
  std::vector<DeviceSpec> devices;
  std::vector<Service> services;
  ChannelSpec channel;
  PolicyKind policy = PolicyKind::Lrr;
  int candidate_limit = 8;
  double c_bound = 0.0;
  double response_fraction = 0.05;
  LoadSemantics load_semantics = LoadSemantics::Consumed;
  double p_avg = 0.6;  // per-device average penalty budget
  RequestProfile requests;
  std::vector<BackgroundLoad> background_loads;
  double stability_epsilon = 1e-3;
  double delta_tout = -1.0;  // tail diagnostic bound; negative derives it
  double y0_min = 0.0;
  double y0_max = -1.0;  // negative means the device count

  void validate() const;
};

struct SlotRecord {
  long slot = 0;
  double queue = 0.0;            // Q(t) at slot start
  double arrivals = 0.0;         // a(t)
  double departures = 0.0;       // b(t) in the queue update (completions + drops)
  double completions = 0.0;
  double drops = 0.0;
  double waiting_backlog = 0.0;  // requests awaiting placement this slot
  double y0 = 0.0;
  int realloc_event = 0;
  std::vector<double> utilization;  // device-major, one fraction per kind
};

struct Metrics {
  std::vector<std::string> device_ids;
  std::vector<SlotRecord> slots;
  std::vector<std::vector<double>> z_series;  // per device, Z(t) at slot start

  double avg_latency_s = 0.0;
  double avg_queue = 0.0;
  double tail_violation = 0.0;
  double y0_time_average = 0.0;
  double delta_tout_used = 0.0;
  long reallocations = 0;
  long timeout_drops = 0;
  long completed = 0;
  long pending_at_end = 0;  // waiting or still in service when the run ended
  long arrivals_total = 0;
  long overcommit_rejections = 0;
  std::vector<std::array<double, kNumResourceKinds>> avg_utilization;
  std::vector<bool> z_stable;
};

/// Seeded i.i.d. arrivals: Poisson batch sizes with the configured mean and
/// request attributes drawn from the profile.
std::vector<std::vector<Request>> generate_arrivals(double arrival_rate, std::uint64_t seed,
                                                    long slots, const RequestProfile& profile,
                                                    const std::vector<Service>& services,
                                                    std::size_t users);

/// Runs the discrete-time engine and returns the recorded metrics.
Metrics run(const SimConfig& config);

}  // namespace edgeprov
