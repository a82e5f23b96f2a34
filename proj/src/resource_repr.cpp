#include "edgeprov/resource_repr.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>
#include <vector>

namespace edgeprov {

namespace {

// Fractions are carried on a 1e-6 grid so that serialize/parse is lossless.
double quantize_usage(double fraction, double capacity, double available) {
  if (fraction <= 0.0) return 0.0;
  if (fraction >= 1.0) return 1.0;
  long long grid = std::llround(fraction * 1e6);
  // Never overstate availability: bump the usage up when rounding gave back
  // more capacity than the device really has.
  if (capacity > 0.0 &&
      (1.0 - static_cast<double>(grid) / 1e6) * capacity > available + 1e-6) {
    ++grid;
  }
  grid = std::clamp<long long>(grid, 0, 1000000);
  return static_cast<double>(grid) / 1e6;
}

std::uint64_t floor_to_u64(double value) {
  if (value <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::floor(value));
}

std::uint64_t round_to_u64(double value) {
  if (value <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::llround(value));
}

std::string format_fraction(double value) {
  char buf[40];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 6);
  std::string text(buf, result.ptr);
  if (text.find('.') != std::string::npos) {
    text.erase(text.find_last_not_of('0') + 1);
    if (!text.empty() && text.back() == '.') text.pop_back();
  }
  if (text == "-0") text = "0";
  return text;
}

void append_escaped(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

struct ParserState {
  std::vector<std::string> path;
  std::string text;
  std::map<std::string, std::string> leaves;   // "cpu/usage" -> raw text
  std::vector<std::string> sections;           // depth-2 elements seen
  std::string device_attr;
  std::string slot_attr;
  bool have_device_attr = false;
  bool have_slot_attr = false;
  bool root_seen = false;
  std::string abort_reason;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<ParserState*>(user);
  state->path.emplace_back(name);
  state->text.clear();
  if (state->path.size() == 1) {
    state->root_seen = true;
    if (state->path.front() != "resources") {
      state->abort_reason = "root element must be 'resources', found '" +
                            state->path.front() + "'";
      return;
    }
    for (const XML_Char** a = attrs; a != nullptr && *a != nullptr; a += 2) {
      const std::string_view key = a[0];
      if (key == "device") {
        state->device_attr = a[1];
        state->have_device_attr = true;
      } else if (key == "slot") {
        state->slot_attr = a[1];
        state->have_slot_attr = true;
      }
    }
  } else if (state->path.size() == 2) {
    state->sections.emplace_back(name);
  }
}

void XMLCALL on_end(void* user, const XML_Char* /*name*/) {
  auto* state = static_cast<ParserState*>(user);
  if (state->path.size() == 3) {
    const std::string key = state->path[1] + "/" + state->path[2];
    state->leaves[key] = std::string(trim(state->text));
  }
  state->text.clear();
  state->path.pop_back();
}

void XMLCALL on_text(void* user, const XML_Char* data, int len) {
  auto* state = static_cast<ParserState*>(user);
  state->text.append(data, static_cast<std::size_t>(len));
}

const std::string& require_leaf(const ParserState& state, const std::string& key) {
  const auto it = state.leaves.find(key);
  if (it == state.leaves.end()) {
    throw ValidationError("resource descriptor is missing required element '" + key + "'");
  }
  return it->second;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  std::from_chars_result result{};
  if constexpr (std::is_floating_point_v<T>) {
    result = std::from_chars(begin, end, value, std::chars_format::general);
  } else {
    result = std::from_chars(begin, end, value);
  }
  if (result.ec != std::errc() || result.ptr != end || text.empty()) {
    throw ValidationError("element '" + where + "' holds an invalid number: '" + text + "'");
  }
  return value;
}

}  // namespace

void ResourceDescriptor::validate() const {
  if (device.empty()) throw ValidationError("descriptor has an empty device id");
  if (cpu.cores < 1) throw ValidationError("descriptor must report at least one core");
  if (cpu.usage < 0.0 || cpu.usage > 1.0) {
    throw ValidationError("cpu usage must be a fraction in [0, 1]");
  }
  if (memory.available_bytes > memory.total_bytes) {
    throw ValidationError("memory available exceeds total");
  }
  if (storage.available_bytes > storage.total_bytes) {
    throw ValidationError("storage available exceeds total");
  }
  if (network.available_bps > network.capacity_bps) {
    throw ValidationError("network available exceeds capacity");
  }
}

ResourceDescriptor snapshot(const EdgeDevice& device, long slot) {
  const ResourceVector cap = device.capacity();
  const ResourceVector avail = residual(device);

  ResourceDescriptor d;
  d.device = device.id();
  d.taken_at = slot;

  d.cpu.family = device.cpu_family();
  d.cpu.architecture = device.cpu_architecture();
  d.cpu.cores = device.cores();
  d.cpu.frequency_hz = round_to_u64(device.frequency_hz());
  const double used_fraction =
      cap.processing() > 0.0 ? 1.0 - avail.processing() / cap.processing() : 0.0;
  d.cpu.usage = quantize_usage(used_fraction, cap.processing(), avail.processing());

  d.memory.total_bytes = round_to_u64(cap.memory());
  d.memory.available_bytes =
      std::min(d.memory.total_bytes, floor_to_u64(avail.memory()));

  d.storage.total_bytes = round_to_u64(cap.storage());
  d.storage.available_bytes =
      std::min(d.storage.total_bytes, floor_to_u64(avail.storage()));
  d.storage.read_bps = round_to_u64(device.read_speed());
  d.storage.write_bps = round_to_u64(device.write_speed());

  d.network.capacity_bps = round_to_u64(cap.networking());
  d.network.available_bps =
      std::min(d.network.capacity_bps, floor_to_u64(avail.networking()));

  d.validate();
  return d;
}

std::string to_xml(const ResourceDescriptor& descriptor) {
  descriptor.validate();
  std::string out;
  out.reserve(640);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<resources device=\"";
  append_escaped(out, descriptor.device);
  out += "\" slot=\"" + std::to_string(descriptor.taken_at) + "\">\n";

  out += "  <cpu>\n";
  out += "    <family>";
  append_escaped(out, descriptor.cpu.family);
  out += "</family>\n";
  out += "    <architecture>";
  append_escaped(out, descriptor.cpu.architecture);
  out += "</architecture>\n";
  out += "    <cores>" + std::to_string(descriptor.cpu.cores) + "</cores>\n";
  out += "    <frequency_hz>" + std::to_string(descriptor.cpu.frequency_hz) +
         "</frequency_hz>\n";
  out += "    <usage>" + format_fraction(descriptor.cpu.usage) + "</usage>\n";
  out += "  </cpu>\n";

  out += "  <memory>\n";
  out += "    <total_bytes>" + std::to_string(descriptor.memory.total_bytes) +
         "</total_bytes>\n";
  out += "    <available_bytes>" + std::to_string(descriptor.memory.available_bytes) +
         "</available_bytes>\n";
  out += "  </memory>\n";

  out += "  <storage>\n";
  out += "    <total_bytes>" + std::to_string(descriptor.storage.total_bytes) +
         "</total_bytes>\n";
  out += "    <available_bytes>" + std::to_string(descriptor.storage.available_bytes) +
         "</available_bytes>\n";
  out += "    <read_bps>" + std::to_string(descriptor.storage.read_bps) + "</read_bps>\n";
  out += "    <write_bps>" + std::to_string(descriptor.storage.write_bps) +
         "</write_bps>\n";
  out += "  </storage>\n";

  out += "  <network>\n";
  out += "    <capacity_bps>" + std::to_string(descriptor.network.capacity_bps) +
         "</capacity_bps>\n";
  out += "    <available_bps>" + std::to_string(descriptor.network.available_bps) +
         "</available_bps>\n";
  out += "  </network>\n";
  out += "</resources>\n";
  return out;
}

ResourceDescriptor from_xml(std::string_view xml) {
  ParserState state;
  XML_Parser parser = XML_ParserCreate("UTF-8");
  if (parser == nullptr) throw Error("failed to create XML parser");

  XML_SetUserData(parser, &state);
  XML_SetElementHandler(parser, on_start, on_end);
  XML_SetCharacterDataHandler(parser, on_text);

  const XML_Status status =
      XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), /*isFinal=*/1);
  const XML_Error code = XML_GetErrorCode(parser);
  const auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser));
  XML_ParserFree(parser);

  if (!state.abort_reason.empty()) throw ValidationError(state.abort_reason);
  if (status == XML_STATUS_ERROR) {
    throw ParseError(std::string("malformed XML: ") + XML_ErrorString(code), offset);
  }
  if (!state.root_seen) throw ParseError("empty document", 0);

  if (!state.have_device_attr) {
    throw ValidationError("resources element is missing the 'device' attribute");
  }
  if (!state.have_slot_attr) {
    throw ValidationError("resources element is missing the 'slot' attribute");
  }
  for (const char* section : {"cpu", "memory", "storage", "network"}) {
    if (std::find(state.sections.begin(), state.sections.end(), section) ==
        state.sections.end()) {
      throw ValidationError(std::string("resource descriptor is missing required element '") +
                            section + "'");
    }
  }

  ResourceDescriptor d;
  d.device = state.device_attr;
  d.taken_at = parse_number<long>(state.slot_attr, "resources@slot");

  d.cpu.family = require_leaf(state, "cpu/family");
  d.cpu.architecture = require_leaf(state, "cpu/architecture");
  d.cpu.cores = parse_number<int>(require_leaf(state, "cpu/cores"), "cpu/cores");
  d.cpu.frequency_hz =
      parse_number<std::uint64_t>(require_leaf(state, "cpu/frequency_hz"), "cpu/frequency_hz");
  d.cpu.usage = parse_number<double>(require_leaf(state, "cpu/usage"), "cpu/usage");

  d.memory.total_bytes = parse_number<std::uint64_t>(
      require_leaf(state, "memory/total_bytes"), "memory/total_bytes");
  d.memory.available_bytes = parse_number<std::uint64_t>(
      require_leaf(state, "memory/available_bytes"), "memory/available_bytes");

  d.storage.total_bytes = parse_number<std::uint64_t>(
      require_leaf(state, "storage/total_bytes"), "storage/total_bytes");
  d.storage.available_bytes = parse_number<std::uint64_t>(
      require_leaf(state, "storage/available_bytes"), "storage/available_bytes");
  d.storage.read_bps = parse_number<std::uint64_t>(require_leaf(state, "storage/read_bps"),
                                                   "storage/read_bps");
  d.storage.write_bps = parse_number<std::uint64_t>(
      require_leaf(state, "storage/write_bps"), "storage/write_bps");

  d.network.capacity_bps = parse_number<std::uint64_t>(
      require_leaf(state, "network/capacity_bps"), "network/capacity_bps");
  d.network.available_bps = parse_number<std::uint64_t>(
      require_leaf(state, "network/available_bps"), "network/available_bps");

  d.validate();
  return d;
}

Registry::Registry(long max_age_slots) : max_age_slots_(max_age_slots) {
  if (max_age_slots_ < 0) throw DomainError("registry max age must be non-negative");
}

void Registry::track(const std::string& device_id) {
  std::unique_lock lock(mutex_);
  entries_.try_emplace(device_id, std::nullopt);
}

bool Registry::tracked(const std::string& device_id) const {
  std::shared_lock lock(mutex_);
  return entries_.find(device_id) != entries_.end();
}

ResourceDescriptor Registry::supervisor_query(const EdgeDevice& device, long slot) {
  std::unique_lock lock(mutex_);
  const auto it = entries_.find(device.id());
  if (it == entries_.end()) {
    throw DomainError("device '" + device.id() + "' is not registered with the supervisor");
  }
  if (it->second.has_value() && it->second->taken_at > slot) {
    throw InvariantError("descriptor for '" + device.id() + "' would move backwards in time");
  }
  // The exchange always crosses the wire format, even in-process.
  const ResourceDescriptor parsed = from_xml(to_xml(snapshot(device, slot)));
  it->second = parsed;
  return parsed;
}

std::optional<ResourceDescriptor> Registry::find(const std::string& device_id) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(device_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

}  // namespace edgeprov
