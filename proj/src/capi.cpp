#include "edgeprov/edgeprov.h"

#include <cstring>
#include <string>

#include "edgeprov/experiment.hpp"
#include "edgeprov/presets.hpp"
#include "edgeprov/resource_repr.hpp"

namespace {

thread_local std::string g_last_error;

edgeprov_status fail(edgeprov_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
edgeprov_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const edgeprov::ParseError& error) {
    return fail(EDGEPROV_ERR_PARSE, error.what());
  } catch (const edgeprov::ValidationError& error) {
    return fail(EDGEPROV_ERR_VALIDATION, error.what());
  } catch (const edgeprov::ConfigError& error) {
    return fail(EDGEPROV_ERR_CONFIG, error.what());
  } catch (const edgeprov::DomainError& error) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, error.what());
  } catch (const std::exception& error) {
    return fail(EDGEPROV_ERR_INTERNAL, error.what());
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

struct edgeprov_spec {
  edgeprov::ExperimentSpec spec;
};

struct edgeprov_metrics {
  edgeprov::Metrics metrics;
};

struct edgeprov_descriptor {
  edgeprov::ResourceDescriptor descriptor;
};

extern "C" {

const char* edgeprov_version(void) { return "1.0.0"; }

const char* edgeprov_last_error(void) { return g_last_error.c_str(); }

edgeprov_status edgeprov_spec_create(edgeprov_spec** out) {
  if (out == nullptr) return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "out must not be null");
  return guarded([&] {
    *out = new edgeprov_spec{edgeprov::parse_config("")};
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_spec_parse(const char* text, edgeprov_spec** out) {
  if (text == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "text and out must not be null");
  }
  return guarded([&] {
    *out = new edgeprov_spec{edgeprov::parse_config(text)};
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_spec_load(const char* path, edgeprov_spec** out) {
  if (path == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "path and out must not be null");
  }
  return guarded([&] {
    *out = new edgeprov_spec{edgeprov::load_config(path)};
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_spec_set(edgeprov_spec* spec, const char* key, const char* value) {
  if (spec == nullptr || key == nullptr || value == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "spec, key and value must not be null");
  }
  return guarded([&] {
    edgeprov::apply_override(spec->spec, key, value);
    return EDGEPROV_OK;
  });
}

void edgeprov_spec_free(edgeprov_spec* spec) { delete spec; }

edgeprov_status edgeprov_run_experiments(const edgeprov_spec* spec, int print_table,
                                         int* runs_out) {
  if (spec == nullptr) return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "spec must not be null");
  return guarded([&] {
    std::vector<edgeprov::RunResult> results;
    const int exit_code = edgeprov::run_experiments(spec->spec, print_table != 0, &results);
    if (exit_code != 0) return fail(EDGEPROV_ERR_INTERNAL, "a run failed; see stderr");
    if (runs_out != nullptr) *runs_out = static_cast<int>(results.size());
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_run_single(const edgeprov_spec* spec, edgeprov_metrics** out) {
  if (spec == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "spec and out must not be null");
  }
  return guarded([&] {
    edgeprov::SimConfig config = spec->spec.base;
    config.seed = spec->spec.seeds.front();
    *out = new edgeprov_metrics{edgeprov::run(config)};
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_metrics_summary(const edgeprov_metrics* metrics,
                                         edgeprov_summary* out) {
  if (metrics == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "metrics and out must not be null");
  }
  const edgeprov::Metrics& m = metrics->metrics;
  out->avg_latency_s = m.avg_latency_s;
  out->avg_queue = m.avg_queue;
  out->tail_violation = m.tail_violation;
  out->y0_time_average = m.y0_time_average;
  out->reallocations = m.reallocations;
  out->timeout_drops = m.timeout_drops;
  out->completed = m.completed;
  out->arrivals = m.arrivals_total;
  out->overcommit_rejections = m.overcommit_rejections;
  return EDGEPROV_OK;
}

int64_t edgeprov_metrics_slot_count(const edgeprov_metrics* metrics) {
  if (metrics == nullptr) return 0;
  return static_cast<int64_t>(metrics->metrics.slots.size());
}

edgeprov_status edgeprov_metrics_series(const edgeprov_metrics* metrics, const char* name,
                                        double* buf, int64_t cap, int64_t* written) {
  if (metrics == nullptr || name == nullptr || buf == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "metrics, name and buf must not be null");
  }
  const std::string series(name);
  auto pick = [&](const edgeprov::SlotRecord& record) -> double {
    if (series == "queue") return record.queue;
    if (series == "arrivals") return record.arrivals;
    if (series == "departures") return record.departures;
    if (series == "completions") return record.completions;
    if (series == "drops") return record.drops;
    if (series == "waiting_backlog") return record.waiting_backlog;
    if (series == "y0") return record.y0;
    if (series == "realloc_event") return record.realloc_event;
    throw edgeprov::DomainError("unknown series '" + series + "'");
  };
  return guarded([&] {
    const auto& slots = metrics->metrics.slots;
    int64_t count = 0;
    for (const edgeprov::SlotRecord& record : slots) {
      if (count >= cap) break;
      buf[count++] = pick(record);
    }
    if (written != nullptr) *written = count;
    return EDGEPROV_OK;
  });
}

void edgeprov_metrics_free(edgeprov_metrics* metrics) { delete metrics; }

int edgeprov_preset_count(void) {
  return static_cast<int>(edgeprov::preset_names().size());
}

const char* edgeprov_preset_name(int index) {
  static thread_local std::string name;
  const auto names = edgeprov::preset_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  name = names[static_cast<std::size_t>(index)];
  return name.c_str();
}

edgeprov_status edgeprov_preset_describe(const char* name, char** out) {
  if (name == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "name and out must not be null");
  }
  return guarded([&] {
    try {
      *out = copy_string(edgeprov::preset_description(name));
    } catch (const edgeprov::ConfigError& error) {
      return fail(EDGEPROV_ERR_NOT_FOUND, error.what());
    }
    return EDGEPROV_OK;
  });
}

void edgeprov_string_free(char* text) { delete[] text; }

edgeprov_status edgeprov_descriptor_from_xml(const char* xml, edgeprov_descriptor** out) {
  if (xml == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "xml and out must not be null");
  }
  return guarded([&] {
    *out = new edgeprov_descriptor{edgeprov::from_xml(xml)};
    return EDGEPROV_OK;
  });
}

edgeprov_status edgeprov_descriptor_to_xml(const edgeprov_descriptor* descriptor, char** out) {
  if (descriptor == nullptr || out == nullptr) {
    return fail(EDGEPROV_ERR_INVALID_ARGUMENT, "descriptor and out must not be null");
  }
  return guarded([&] {
    *out = copy_string(edgeprov::to_xml(descriptor->descriptor));
    return EDGEPROV_OK;
  });
}

void edgeprov_descriptor_free(edgeprov_descriptor* descriptor) { delete descriptor; }

}  // extern "C"
