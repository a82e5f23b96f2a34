/*
 * edgeprov — latency-aware resource provisioning at the network edge.
 *
 * C interface to the simulator core. All functions return a status code;
 * on failure the thread-local message from edgeprov_last_error() describes
 * what went wrong. Handles are opaque and owned by the caller via the
 * matching *_free function.
 */
#ifndef EDGEPROV_H
#define EDGEPROV_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum edgeprov_status {
  EDGEPROV_OK = 0,
  EDGEPROV_ERR_INVALID_ARGUMENT = 1,
  EDGEPROV_ERR_CONFIG = 2,
  EDGEPROV_ERR_PARSE = 3,
  EDGEPROV_ERR_VALIDATION = 4,
  EDGEPROV_ERR_NOT_FOUND = 5,
  EDGEPROV_ERR_IO = 6,
  EDGEPROV_ERR_INTERNAL = 7,
} edgeprov_status;

typedef struct edgeprov_spec edgeprov_spec;             /* an experiment: config + sweep + seeds */
typedef struct edgeprov_metrics edgeprov_metrics;       /* the results of one run */
typedef struct edgeprov_descriptor edgeprov_descriptor; /* a device resource descriptor */

const char* edgeprov_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* edgeprov_last_error(void);

/* ---- experiment specs ---------------------------------------------------- */

/* A spec with all defaults (the table2 preset). */
edgeprov_status edgeprov_spec_create(edgeprov_spec** out);

/* Parse a JSON experiment configuration. */
edgeprov_status edgeprov_spec_parse(const char* text, edgeprov_spec** out);

/* Load a JSON experiment configuration from a file. */
edgeprov_status edgeprov_spec_load(const char* path, edgeprov_spec** out);

/* Override one field by name, e.g. ("V", "50"), ("policy", "greedy-match"),
 * ("seed", "7"), ("slots", "2000"), ("load_semantics", "consumed"),
 * ("output_dir", "out"). */
edgeprov_status edgeprov_spec_set(edgeprov_spec* spec, const char* key, const char* value);

void edgeprov_spec_free(edgeprov_spec* spec);

/* ---- running ------------------------------------------------------------- */

/* Expands the sweep, executes every run, writes one per-slot CSV per run
 * plus summary.csv into the spec's output directory, and optionally prints
 * the summary table to stdout. runs_out (optional) receives the number of
 * runs executed. */
edgeprov_status edgeprov_run_experiments(const edgeprov_spec* spec, int print_table,
                                         int* runs_out);

/* Runs the base configuration once (first seed, ignoring sweep axes). */
edgeprov_status edgeprov_run_single(const edgeprov_spec* spec, edgeprov_metrics** out);

/* ---- metrics ------------------------------------------------------------- */

typedef struct edgeprov_summary {
  double avg_latency_s;
  double avg_queue;
  double tail_violation;
  double y0_time_average;
  int64_t reallocations;
  int64_t timeout_drops;
  int64_t completed;
  int64_t arrivals;
  int64_t overcommit_rejections;
} edgeprov_summary;

edgeprov_status edgeprov_metrics_summary(const edgeprov_metrics* metrics,
                                         edgeprov_summary* out);

int64_t edgeprov_metrics_slot_count(const edgeprov_metrics* metrics);

/* Copies one per-slot series ("queue", "arrivals", "departures",
 * "completions", "drops", "waiting_backlog", "y0", "realloc_event") into
 * buf, up to cap entries; written receives the copied count. */
edgeprov_status edgeprov_metrics_series(const edgeprov_metrics* metrics, const char* name,
                                        double* buf, int64_t cap, int64_t* written);

void edgeprov_metrics_free(edgeprov_metrics* metrics);

/* ---- presets ------------------------------------------------------------- */

int edgeprov_preset_count(void);
const char* edgeprov_preset_name(int index);

/* Description text; free with edgeprov_string_free. */
edgeprov_status edgeprov_preset_describe(const char* name, char** out);

void edgeprov_string_free(char* text);

/* ---- resource descriptors ------------------------------------------------ */

/* Parse a descriptor XML document (the wire format devices expose). */
edgeprov_status edgeprov_descriptor_from_xml(const char* xml, edgeprov_descriptor** out);

/* Serialize a descriptor back to its canonical XML form; free the string
 * with edgeprov_string_free. */
edgeprov_status edgeprov_descriptor_to_xml(const edgeprov_descriptor* descriptor, char** out);

void edgeprov_descriptor_free(edgeprov_descriptor* descriptor);

#ifdef __cplusplus
}
#endif

#endif /* EDGEPROV_H */
