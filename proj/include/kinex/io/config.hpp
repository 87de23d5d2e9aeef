#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kinex/counts.hpp"
#include "kinex/depairing.hpp"
#include "kinex/material.hpp"
#include "kinex/network.hpp"
#include "kinex/pipeline.hpp"

namespace kinex::io {

/// Bias currents for one temperature: an explicit list, or `points` values
/// from 0 to `max_fraction` of the device depairing current at that temperature.
struct CurrentGrid {
    std::vector<double> values;
    std::optional<double> max_fraction;
    int points = 0;

    std::vector<double> at(const DeviceModel& dev, double t) const;
};

struct SweepPlan {
    std::vector<double> freqs{linear_grid(4.0, 10.0, 3001)};
    CurrentGrid currents{{0.0}, std::nullopt, 0};
    std::vector<double> temperatures{4.0};
    std::vector<double> fields{0.0};

    /// Every (I, T, B) point, ordered by T, then B, then I.
    std::vector<BiasPoint> biases(const DeviceModel& dev) const;
};

struct CountsConfig {
    CountModel model = default_count_model();
    double threshold = 1.0;            // counts / s
    std::vector<double> current_grid;  // empty: derived from the sites
    std::vector<double> temperatures{2.0, 3.0, 4.0};
};

struct DeviceConfig {
    int schema_version = 1;
    MaterialState material;
    DeviceModel device;
    CountsConfig counts;
    CalibrationTable calib;
    SweepPlan sweeps;
    PipelineOptions pipeline;
};

DeviceConfig parse_config(const std::string& json_text);
DeviceConfig load_config(const std::string& path);

}  // namespace kinex::io
