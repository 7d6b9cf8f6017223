#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pdo {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class Comparison { le, ge };

/// One checked quantity. pass = value <= threshold (le) or value >= threshold
/// (ge); a NaN value never passes.
struct Metric {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    Comparison comparison = Comparison::le;
    bool pass = false;
    std::string note;

    friend bool operator==(const Metric&, const Metric&) = default;
};

/// A sample of plot data: one (x, value) pair of a named series.
struct SeriesPoint {
    std::string series;
    double x = 0.0;
    double value = 0.0;

    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

class VerificationReport {
public:
    VerificationReport() = default;
    explicit VerificationReport(std::string scenario) : scenario_(std::move(scenario)) {}

    const std::string& scenario() const noexcept { return scenario_; }
    const std::string& version() const noexcept { return version_; }

    const nlohmann::ordered_json& config() const noexcept { return config_; }
    void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }

    /// Appends a metric and evaluates its pass flag. Returns the stored metric.
    const Metric& add_metric(std::string name, double value, double threshold, Comparison cmp = Comparison::le,
                             std::string note = {});
    const std::vector<Metric>& metrics() const noexcept { return metrics_; }
    /// First metric with this name; throws std::out_of_range when absent.
    const Metric& metric(const std::string& name) const;
    bool has_metric(const std::string& name) const noexcept;

    void add_series(std::string series, double x, double value);
    const std::vector<SeriesPoint>& series() const noexcept { return series_; }

    void add_timing(std::string phase, double milliseconds);
    const std::vector<std::pair<std::string, double>>& timings() const noexcept { return timings_; }

    void add_warning(std::string warning) { warnings_.push_back(std::move(warning)); }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Merges metrics, series, warnings and timings of another report; metric
    /// names get `prefix` prepended.
    void absorb(const VerificationReport& other, const std::string& prefix = {});

    /// True iff the metric list is non-empty and every metric passes.
    bool pass() const noexcept;

    nlohmann::ordered_json to_json(bool include_timings = true) const;
    static VerificationReport from_json(const nlohmann::ordered_json& j);

    friend bool operator==(const VerificationReport& a, const VerificationReport& b);

private:
    std::string scenario_;
    std::string version_ = kArtifactVersion;
    nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
    std::vector<Metric> metrics_;
    std::vector<SeriesPoint> series_;
    std::vector<std::pair<std::string, double>> timings_;
    std::vector<std::string> warnings_;
};

const char* to_string(Comparison c) noexcept;

/// Writes the JSON report (two-space indentation, fixed key order). Throws
/// InvalidInput for a report without metrics and Error on I/O failure.
void write_report_json(const VerificationReport& report, const std::filesystem::path& path);
VerificationReport read_report_json(const std::filesystem::path& path);

/// One row per metric: name,value,threshold,comparison,pass.
void write_report_csv(const VerificationReport& report, const std::filesystem::path& path);

/// Plot data with header x,value,series.
void write_plot_csv(const VerificationReport& report, const std::filesystem::path& path);

}  // namespace pdo
