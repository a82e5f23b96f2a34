#include "edgeprov/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "edgeprov/presets.hpp"

namespace edgeprov {

namespace {

using nlohmann::json;

const std::vector<std::string>& sweepable_fields() {
  static const std::vector<std::string> fields = {
      "slots",       "arrival_rate",      "V",
      "rate_norm",   "rate_th",           "slot_length",
      "policy",      "candidate_limit",   "C",
      "response_fraction", "load_semantics", "p_avg",
  };
  return fields;
}

const std::vector<std::string>& top_level_keys() {
  static const std::vector<std::string> keys = {
      "preset",        "slots",        "seed",          "seeds",
      "arrival_rate",  "V",            "rate_norm",     "rate_th",
      "slot_length",   "policy",       "candidate_limit", "C",
      "response_fraction", "load_semantics", "p_avg",   "stability_epsilon",
      "delta_tout",    "devices",      "services",      "channel",
      "requests",      "background_loads", "sweep",     "output_dir",
  };
  return keys;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t previous = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = previous;
    }
  }
  return row[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& valid) {
  std::string best;
  std::size_t best_distance = SIZE_MAX;
  for (const std::string& candidate : valid) {
    const std::size_t distance = edit_distance(key, candidate);
    if (distance < best_distance) {
      best_distance = distance;
      best = candidate;
    }
  }
  return best;
}

[[noreturn]] void reject_key(const std::string& key, const std::vector<std::string>& valid,
                             const std::string& where) {
  throw ConfigError("unknown key '" + key + "' at " + where + "; did you mean '" +
                    nearest_key(key, valid) + "'?");
}

void check_keys(const json& object, const std::vector<std::string>& valid,
                const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(valid.begin(), valid.end(), key) == valid.end()) {
      reject_key(key, valid, where);
    }
  }
}

double number_at(const json& value, const std::string& path) {
  if (!value.is_number()) {
    throw ConfigError("config: " + path + " expects a number, got " +
                      std::string(value.type_name()));
  }
  return value.get<double>();
}

long integer_at(const json& value, const std::string& path) {
  if (!value.is_number_integer()) {
    throw ConfigError("config: " + path + " expects an integer, got " +
                      std::string(value.type_name()));
  }
  return value.get<long>();
}

std::string string_at(const json& value, const std::string& path) {
  if (!value.is_string()) {
    throw ConfigError("config: " + path + " expects a string, got " +
                      std::string(value.type_name()));
  }
  return value.get<std::string>();
}

/// Applies one scalar field to the config; shared by top-level keys, sweep
/// axes and CLI overrides.
void apply_field(SimConfig& config, const std::string& name, const json& value,
                 const std::string& path) {
  if (name == "slots") {
    config.slots = integer_at(value, path);
  } else if (name == "arrival_rate") {
    config.arrival_rate = number_at(value, path);
  } else if (name == "V") {
    config.v = number_at(value, path);
  } else if (name == "rate_norm") {
    config.rate_norm = number_at(value, path);
  } else if (name == "rate_th") {
    config.rate_th = number_at(value, path);
  } else if (name == "slot_length") {
    config.slot_length = number_at(value, path);
  } else if (name == "policy") {
    config.policy = policy_from_string(string_at(value, path));
  } else if (name == "candidate_limit") {
    config.candidate_limit = static_cast<int>(integer_at(value, path));
  } else if (name == "C") {
    config.c_bound = number_at(value, path);
  } else if (name == "response_fraction") {
    config.response_fraction = number_at(value, path);
  } else if (name == "load_semantics") {
    config.load_semantics = load_semantics_from_string(string_at(value, path));
  } else if (name == "p_avg") {
    config.p_avg = number_at(value, path);
  } else if (name == "stability_epsilon") {
    config.stability_epsilon = number_at(value, path);
  } else if (name == "delta_tout") {
    config.delta_tout = number_at(value, path);
  } else if (name == "seed") {
    config.seed = static_cast<std::uint64_t>(integer_at(value, path));
  } else {
    reject_key(name, sweepable_fields(), path);
  }
}

ResourceVector resource_vector_from(const json& object, const std::string& path) {
  return ResourceVector(number_at(object.at("processing"), path + ".processing"),
                        number_at(object.at("storage"), path + ".storage"),
                        number_at(object.at("memory"), path + ".memory"),
                        number_at(object.at("networking"), path + ".networking"));
}

void parse_devices(SimConfig& config, const json& devices, const std::string& path) {
  static const std::vector<std::string> keys = {
      "id",        "processing", "storage",      "memory", "networking",
      "read_speed", "write_speed", "compute_rate", "cores",  "family",
      "architecture"};
  if (!devices.is_array()) throw ConfigError("config: " + path + " expects an array");
  config.devices.clear();
  std::size_t index = 0;
  for (const json& entry : devices) {
    const std::string where = path + "[" + std::to_string(index++) + "]";
    if (!entry.is_object()) throw ConfigError("config: " + where + " expects an object");
    check_keys(entry, keys, where);
    DeviceSpec spec;
    spec.id = string_at(entry.at("id"), where + ".id");
    spec.capacity = resource_vector_from(entry, where);
    spec.read_speed = number_at(entry.at("read_speed"), where + ".read_speed");
    spec.write_speed = number_at(entry.at("write_speed"), where + ".write_speed");
    spec.compute_rate = number_at(entry.at("compute_rate"), where + ".compute_rate");
    if (entry.contains("cores")) {
      spec.cores = static_cast<int>(integer_at(entry.at("cores"), where + ".cores"));
    }
    if (entry.contains("family")) spec.family = string_at(entry.at("family"), where + ".family");
    if (entry.contains("architecture")) {
      spec.architecture = string_at(entry.at("architecture"), where + ".architecture");
    }
    config.devices.push_back(std::move(spec));
  }
}

void parse_services(SimConfig& config, const json& services, const std::string& path) {
  static const std::vector<std::string> keys = {"id", "processing", "storage", "memory",
                                                "networking"};
  if (!services.is_array()) throw ConfigError("config: " + path + " expects an array");
  config.services.clear();
  std::size_t index = 0;
  for (const json& entry : services) {
    const std::string where = path + "[" + std::to_string(index++) + "]";
    if (!entry.is_object()) throw ConfigError("config: " + where + " expects an object");
    check_keys(entry, keys, where);
    config.services.emplace_back(string_at(entry.at("id"), where + ".id"),
                                 resource_vector_from(entry, where));
  }
}

void parse_channel(SimConfig& config, const json& channel, const std::string& path) {
  static const std::vector<std::string> keys = {"bandwidth_hz", "noise_variance", "users"};
  static const std::vector<std::string> user_keys = {"tx_power", "gain"};
  if (!channel.is_object()) throw ConfigError("config: " + path + " expects an object");
  check_keys(channel, keys, path);
  if (channel.contains("bandwidth_hz")) {
    config.channel.bandwidth_hz = number_at(channel.at("bandwidth_hz"), path + ".bandwidth_hz");
  }
  if (channel.contains("noise_variance")) {
    config.channel.noise_variance =
        number_at(channel.at("noise_variance"), path + ".noise_variance");
  }
  if (channel.contains("users")) {
    const json& users = channel.at("users");
    if (!users.is_array()) throw ConfigError("config: " + path + ".users expects an array");
    config.channel.users.clear();
    std::size_t index = 0;
    for (const json& entry : users) {
      const std::string where = path + ".users[" + std::to_string(index++) + "]";
      if (!entry.is_object()) throw ConfigError("config: " + where + " expects an object");
      check_keys(entry, user_keys, where);
      ChannelUser user;
      user.tx_power = number_at(entry.at("tx_power"), where + ".tx_power");
      user.gains = {number_at(entry.at("gain"), where + ".gain")};
      config.channel.users.push_back(std::move(user));
    }
  }
}

void parse_requests(SimConfig& config, const json& requests, const std::string& path) {
  static const std::vector<std::string> keys = {"data_min",    "data_max", "timeout_min",
                                                "timeout_max", "p_read",   "p_write"};
  if (!requests.is_object()) throw ConfigError("config: " + path + " expects an object");
  check_keys(requests, keys, path);
  RequestProfile& profile = config.requests;
  if (requests.contains("data_min")) profile.data_min = number_at(requests.at("data_min"), path + ".data_min");
  if (requests.contains("data_max")) profile.data_max = number_at(requests.at("data_max"), path + ".data_max");
  if (requests.contains("timeout_min")) {
    profile.timeout_min = static_cast<int>(integer_at(requests.at("timeout_min"), path + ".timeout_min"));
  }
  if (requests.contains("timeout_max")) {
    profile.timeout_max = static_cast<int>(integer_at(requests.at("timeout_max"), path + ".timeout_max"));
  }
  if (requests.contains("p_read")) profile.p_read = number_at(requests.at("p_read"), path + ".p_read");
  if (requests.contains("p_write")) profile.p_write = number_at(requests.at("p_write"), path + ".p_write");
}

void parse_background(SimConfig& config, const json& loads, const std::string& path) {
  static const std::vector<std::string> keys = {"device",  "start_slot", "end_slot",
                                                "processing", "storage", "memory",
                                                "networking"};
  if (!loads.is_array()) throw ConfigError("config: " + path + " expects an array");
  config.background_loads.clear();
  std::size_t index = 0;
  for (const json& entry : loads) {
    const std::string where = path + "[" + std::to_string(index++) + "]";
    if (!entry.is_object()) throw ConfigError("config: " + where + " expects an object");
    check_keys(entry, keys, where);
    BackgroundLoad load;
    load.device = string_at(entry.at("device"), where + ".device");
    load.start_slot = integer_at(entry.at("start_slot"), where + ".start_slot");
    load.end_slot = integer_at(entry.at("end_slot"), where + ".end_slot");
    load.amounts = resource_vector_from(entry, where);
    config.background_loads.push_back(std::move(load));
  }
}

std::string json_value_to_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return format_number(value.get<double>());
  return value.dump();
}

unsigned worker_count(std::size_t runs) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("EDGEPROV_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) workers = static_cast<unsigned>(parsed);
  }
  return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(runs, 1)));
}

void write_slot_csv(const std::filesystem::path& path, const Metrics& metrics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "slot,queue,arrivals,departures,completions,drops,waiting_backlog,y0,realloc_event";
  for (const std::string& device : metrics.device_ids) {
    for (ResourceKind kind : kResourceKinds) {
      out << ",util_" << device << "_" << to_string(kind);
    }
  }
  out << "\n";
  for (const SlotRecord& record : metrics.slots) {
    out << record.slot << ',' << format_number(record.queue) << ','
        << format_number(record.arrivals) << ',' << format_number(record.departures) << ','
        << format_number(record.completions) << ',' << format_number(record.drops) << ','
        << format_number(record.waiting_backlog) << ',' << format_number(record.y0) << ','
        << record.realloc_event;
    for (double value : record.utilization) out << ',' << format_number(value);
    out << "\n";
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::size_t ExperimentSpec::total_runs() const {
  std::size_t combos = 1;
  for (const SweepAxis& axis : axes) combos *= axis.values.size();
  return combos * seeds.size();
}

void ExperimentSpec::validate() const {
  base.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  for (const SweepAxis& axis : axes) {
    if (std::find(sweepable_fields().begin(), sweepable_fields().end(), axis.name) ==
        sweepable_fields().end()) {
      reject_key(axis.name, sweepable_fields(), "$.sweep");
    }
    if (axis.values.empty()) {
      throw ConfigError("sweep axis '" + axis.name + "' has no values");
    }
  }
  if (total_runs() > run_cap) {
    throw ConfigError("sweep expands to " + std::to_string(total_runs()) +
                      " runs, above the cap of " + std::to_string(run_cap));
  }
  // Every axis value must be applicable to the base config.
  for (const SweepAxis& axis : axes) {
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      SimConfig probe = base;
      apply_field(probe, axis.name, axis.values[i],
                  "$.sweep." + axis.name + "[" + std::to_string(i) + "]");
    }
  }
}

ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  spec.base = preset_config("table2");

  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  json root = json::object();
  if (!trimmed.empty()) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& error) {
      throw ConfigError(std::string("config is not valid JSON: ") + error.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  }

  check_keys(root, top_level_keys(), "$");

  if (root.contains("preset")) {
    spec.base = preset_config(string_at(root.at("preset"), "$.preset"));
  }
  if (root.contains("devices")) parse_devices(spec.base, root.at("devices"), "$.devices");
  if (root.contains("services")) parse_services(spec.base, root.at("services"), "$.services");
  if (root.contains("channel")) parse_channel(spec.base, root.at("channel"), "$.channel");
  if (root.contains("requests")) parse_requests(spec.base, root.at("requests"), "$.requests");
  if (root.contains("background_loads")) {
    parse_background(spec.base, root.at("background_loads"), "$.background_loads");
  }

  for (const std::string& field : sweepable_fields()) {
    if (root.contains(field)) apply_field(spec.base, field, root.at(field), "$." + field);
  }
  if (root.contains("seed")) apply_field(spec.base, "seed", root.at("seed"), "$.seed");
  if (root.contains("stability_epsilon")) {
    apply_field(spec.base, "stability_epsilon", root.at("stability_epsilon"),
                "$.stability_epsilon");
  }
  if (root.contains("delta_tout")) {
    apply_field(spec.base, "delta_tout", root.at("delta_tout"), "$.delta_tout");
  }

  if (root.contains("seeds")) {
    const json& seeds = root.at("seeds");
    if (!seeds.is_array()) throw ConfigError("config: $.seeds expects an array");
    spec.seeds.clear();
    std::size_t index = 0;
    for (const json& seed : seeds) {
      spec.seeds.push_back(static_cast<std::uint64_t>(
          integer_at(seed, "$.seeds[" + std::to_string(index++) + "]")));
    }
  } else {
    spec.seeds = {spec.base.seed};
  }

  if (root.contains("sweep")) {
    const json& sweep = root.at("sweep");
    if (!sweep.is_object()) throw ConfigError("config: $.sweep expects an object");
    check_keys(sweep, sweepable_fields(), "$.sweep");
    for (const auto& [name, values] : sweep.items()) {
      if (!values.is_array()) {
        throw ConfigError("config: $.sweep." + name + " expects an array of values");
      }
      SweepAxis axis;
      axis.name = name;
      for (const json& value : values) axis.values.push_back(value);
      spec.axes.push_back(std::move(axis));
    }
  }

  if (root.contains("output_dir")) {
    spec.output_dir = string_at(root.at("output_dir"), "$.output_dir");
  }

  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "output_dir") {
    spec.output_dir = value;
    return;
  }
  if (key == "seed") {
    std::uint64_t seed = 0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
      throw ConfigError("override 'seed' expects an unsigned integer, got '" + value + "'");
    }
    spec.base.seed = seed;
    spec.seeds = {seed};
    return;
  }
  json parsed;
  if (key == "policy" || key == "load_semantics") {
    parsed = value;
  } else {
    double number = 0.0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), number);
    if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
      throw ConfigError("override '" + key + "' expects a number, got '" + value + "'");
    }
    if (number == static_cast<double>(static_cast<long long>(number))) {
      parsed = static_cast<long long>(number);
    } else {
      parsed = number;
    }
  }
  apply_field(spec.base, key, parsed, "override '" + key + "'");
  spec.validate();
}

std::vector<std::pair<SimConfig, RunResult>> expand_runs(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::pair<SimConfig, RunResult>> runs;
  std::vector<std::size_t> cursor(spec.axes.size(), 0);

  const std::size_t combos = [&] {
    std::size_t n = 1;
    for (const SweepAxis& axis : spec.axes) n *= axis.values.size();
    return n;
  }();

  std::size_t index = 0;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    SimConfig config = spec.base;
    std::vector<std::pair<std::string, std::string>> swept;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const SweepAxis& axis = spec.axes[a];
      const json& value = axis.values[cursor[a]];
      apply_field(config, axis.name, value, "$.sweep." + axis.name);
      swept.emplace_back(axis.name, json_value_to_text(value));
    }
    for (std::uint64_t seed : spec.seeds) {
      SimConfig run_config = config;
      run_config.seed = seed;
      RunResult result;
      result.index = index++;
      result.swept = swept;
      result.seed = seed;
      runs.emplace_back(std::move(run_config), std::move(result));
    }
    // Odometer over the axis values, last axis fastest.
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++cursor[a] < spec.axes[a].values.size()) break;
      cursor[a] = 0;
    }
  }
  return runs;
}

int run_experiments(const ExperimentSpec& spec, bool print_table,
                    std::vector<RunResult>* results_out) {
  auto runs = expand_runs(spec);

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(runs.size());
  const unsigned workers = worker_count(runs.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= runs.size()) return;
        try {
          runs[i].second.metrics = run(runs[i].first);
        } catch (const std::exception& error) {
          errors[i] = error.what();
        }
      }
    });
  }
  for (std::thread& thread : pool) thread.join();

  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "run " << i << " failed: " << errors[i] << "\n";
      return 1;
    }
  }

  const std::filesystem::path out_dir(spec.output_dir);
  std::filesystem::create_directories(out_dir);

  // Per-run CSVs are written serially, in run order, so parallel and serial
  // execution produce identical files.
  char name[32];
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::snprintf(name, sizeof(name), "run_%04zu.csv", i);
    write_slot_csv(out_dir / name, runs[i].second.metrics);
  }

  std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
  if (!summary) throw Error("cannot open summary.csv for writing");
  summary << "run";
  for (const SweepAxis& axis : spec.axes) summary << ',' << axis.name;
  summary << ",seed,avg_latency_s,avg_queue,tail_violation,reallocations,y0_avg,"
             "completed,timeout_drops,arrivals";
  for (const std::string& device : runs.front().second.metrics.device_ids) {
    for (ResourceKind kind : kResourceKinds) {
      summary << ",util_" << device << "_" << to_string(kind);
    }
  }
  summary << "\n";
  for (const auto& [config, result] : runs) {
    summary << result.index;
    for (const auto& [axis, value] : result.swept) {
      (void)axis;
      summary << ',' << value;
    }
    const Metrics& m = result.metrics;
    summary << ',' << result.seed << ',' << format_number(m.avg_latency_s) << ','
            << format_number(m.avg_queue) << ',' << format_number(m.tail_violation) << ','
            << m.reallocations << ',' << format_number(m.y0_time_average) << ','
            << m.completed << ',' << m.timeout_drops << ',' << m.arrivals_total;
    for (const auto& utilization : m.avg_utilization) {
      for (double value : utilization) summary << ',' << format_number(value);
    }
    summary << "\n";
  }
  summary.close();

  if (print_table) {
    std::cout << std::left << std::setw(6) << "run";
    for (const SweepAxis& axis : spec.axes) std::cout << std::setw(16) << axis.name;
    std::cout << std::setw(8) << "seed" << std::setw(16) << "avg_latency_s" << std::setw(12)
              << "avg_queue" << std::setw(12) << "tail_viol" << std::setw(10) << "reallocs"
              << std::setw(12) << "completed" << std::setw(10) << "drops" << "\n";
    for (const auto& [config, result] : runs) {
      std::cout << std::setw(6) << result.index;
      for (const auto& [axis, value] : result.swept) {
        (void)axis;
        std::cout << std::setw(16) << value;
      }
      const Metrics& m = result.metrics;
      std::cout << std::setw(8) << result.seed << std::setw(16)
                << format_number(m.avg_latency_s) << std::setw(12)
                << format_number(m.avg_queue) << std::setw(12)
                << format_number(m.tail_violation) << std::setw(10) << m.reallocations
                << std::setw(12) << m.completed << std::setw(10) << m.timeout_drops << "\n";
    }
  }

  if (results_out != nullptr) {
    results_out->clear();
    for (auto& [config, result] : runs) results_out->push_back(std::move(result));
  }
  return 0;
}

}  // namespace edgeprov
