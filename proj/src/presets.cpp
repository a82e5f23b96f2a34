#include "edgeprov/presets.hpp"

namespace edgeprov {

namespace {

// Three heterogeneous devices: ed1 is the small all-rounder, ed2 the
// four-core compute box with the big disk, ed3 the memory-rich node behind a
// weak network interface but with fast flash storage.
std::vector<DeviceSpec> table2_devices() {
  std::vector<DeviceSpec> devices;
  devices.push_back(DeviceSpec{
      "ed1",
      ResourceVector(5e9, 20e9, 2e9, 1e9),  // 2 cores @ 2.5 GHz, 20 GB, 2 GB, 1 Gb/s
      1.5e8, 2.0e8, 2.5e8, 2, "generic", "x86_64"});
  devices.push_back(DeviceSpec{
      "ed2",
      ResourceVector(1e10, 30e9, 2e9, 1e9),  // 4 cores @ 2.5 GHz, 30 GB, 2 GB, 1 Gb/s
      4.0e8, 5.0e8, 5.0e8, 4, "generic", "x86_64"});
  devices.push_back(DeviceSpec{
      "ed3",
      ResourceVector(5e9, 20e9, 4e9, 1e8),  // 2 cores @ 2.5 GHz, 20 GB, 4 GB, 0.1 Gb/s
      4.0e8, 5.0e8, 2.5e8, 2, "generic", "arm64"});
  return devices;
}

std::vector<Service> table2_services() {
  return {
      Service("recognize", ResourceVector(1.25e9, 2e9, 8e8, 5e7)),
      Service("archive", ResourceVector(5e8, 5e9, 4e8, 5e7)),
  };
}

ChannelSpec table2_channel() {
  ChannelSpec channel;
  channel.bandwidth_hz = 4e8;
  channel.noise_variance = 1e-9;
  channel.users = {ChannelUser{0.1, {1e-3}}, ChannelUser{0.1, {1e-3}}};
  return channel;
}

}  // namespace

std::vector<std::string> preset_names() { return {"table2"}; }

std::string preset_description(const std::string& name) {
  if (name == "table2") {
    return "table2: one edge node with three heterogeneous devices (ed1 2 cores/2 GB/20 GB, "
           "ed2 4 cores/2 GB/30 GB, ed3 2 cores/4 GB/20 GB), two services and a two-user "
           "uplink; the default experimental setup.";
  }
  throw ConfigError("unknown preset '" + name + "'");
}

SimConfig preset_config(const std::string& name) {
  if (name != "table2") throw ConfigError("unknown preset '" + name + "'");
  SimConfig config;
  config.devices = table2_devices();
  config.services = table2_services();
  config.channel = table2_channel();
  config.slot_length = 0.02;
  config.requests = RequestProfile{};
  return config;
}

}  // namespace edgeprov
