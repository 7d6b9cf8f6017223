#include "pdo/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pdo/error.hpp"

namespace pdo {

const char* to_string(Comparison c) noexcept { return c == Comparison::le ? "le" : "ge"; }

namespace {

Comparison comparison_from_string(const std::string& s) {
    if (s == "le") return Comparison::le;
    if (s == "ge") return Comparison::ge;
    throw InvalidInput("unknown comparison '" + s + "'");
}

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double number_from(const nlohmann::ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

// Shortest decimal text that round-trips the double.
std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

const Metric& VerificationReport::add_metric(std::string name, double value, double threshold, Comparison cmp,
                                             std::string note) {
    Metric m;
    m.name = std::move(name);
    m.value = value;
    m.threshold = threshold;
    m.comparison = cmp;
    m.note = std::move(note);
    m.pass = !std::isnan(value) && (cmp == Comparison::le ? value <= threshold : value >= threshold);
    metrics_.push_back(std::move(m));
    return metrics_.back();
}

const Metric& VerificationReport::metric(const std::string& name) const {
    for (const auto& m : metrics_)
        if (m.name == name) return m;
    throw std::out_of_range("no metric named '" + name + "'");
}

bool VerificationReport::has_metric(const std::string& name) const noexcept {
    for (const auto& m : metrics_)
        if (m.name == name) return true;
    return false;
}

void VerificationReport::add_series(std::string series, double x, double value) {
    series_.push_back({std::move(series), x, value});
}

void VerificationReport::add_timing(std::string phase, double milliseconds) {
    timings_.emplace_back(std::move(phase), milliseconds);
}

void VerificationReport::absorb(const VerificationReport& other, const std::string& prefix) {
    for (Metric m : other.metrics_) {
        m.name = prefix + m.name;
        metrics_.push_back(std::move(m));
    }
    for (SeriesPoint p : other.series_) {
        p.series = prefix + p.series;
        series_.push_back(std::move(p));
    }
    for (const auto& w : other.warnings_) warnings_.push_back(prefix + w);
    for (const auto& [phase, ms] : other.timings_) timings_.emplace_back(prefix + phase, ms);
}

bool VerificationReport::pass() const noexcept {
    if (metrics_.empty()) return false;
    for (const auto& m : metrics_)
        if (!m.pass) return false;
    return true;
}

nlohmann::ordered_json VerificationReport::to_json(bool include_timings) const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_;
    j["version"] = version_;
    j["pass"] = pass();
    j["config"] = config_;
    auto& ms = j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& m : metrics_) {
        nlohmann::ordered_json e;
        e["name"] = m.name;
        e["value"] = number_or_null(m.value);
        e["threshold"] = number_or_null(m.threshold);
        e["comparison"] = to_string(m.comparison);
        e["pass"] = m.pass;
        if (!m.note.empty()) e["note"] = m.note;
        ms.push_back(std::move(e));
    }
    j["warnings"] = warnings_;
    auto& ss = j["series"] = nlohmann::ordered_json::array();
    for (const auto& p : series_) ss.push_back({{"series", p.series}, {"x", number_or_null(p.x)}, {"value", number_or_null(p.value)}});
    if (include_timings) {
        auto& ts = j["timings_ms"] = nlohmann::ordered_json::object();
        for (const auto& [phase, ms_value] : timings_) ts[phase] = ms_value;
    }
    return j;
}

VerificationReport VerificationReport::from_json(const nlohmann::ordered_json& j) {
    try {
        VerificationReport r(j.at("scenario").get<std::string>());
        r.version_ = j.at("version").get<std::string>();
        r.config_ = j.at("config");
        for (const auto& e : j.at("metrics")) {
            Metric m;
            m.name = e.at("name").get<std::string>();
            m.value = number_from(e.at("value"));
            m.threshold = number_from(e.at("threshold"));
            m.comparison = comparison_from_string(e.at("comparison").get<std::string>());
            m.pass = e.at("pass").get<bool>();
            if (e.contains("note")) m.note = e.at("note").get<std::string>();
            r.metrics_.push_back(std::move(m));
        }
        if (j.contains("warnings")) r.warnings_ = j.at("warnings").get<std::vector<std::string>>();
        if (j.contains("series"))
            for (const auto& e : j.at("series"))
                r.series_.push_back({e.at("series").get<std::string>(), number_from(e.at("x")), number_from(e.at("value"))});
        if (j.contains("timings_ms"))
            for (const auto& [phase, ms] : j.at("timings_ms").items()) r.timings_.emplace_back(phase, ms.get<double>());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed report JSON: ") + e.what());
    }
}

bool operator==(const VerificationReport& a, const VerificationReport& b) {
    auto same_metrics = [&] {
        if (a.metrics_.size() != b.metrics_.size()) return false;
        for (std::size_t i = 0; i < a.metrics_.size(); ++i) {
            const Metric& x = a.metrics_[i];
            const Metric& y = b.metrics_[i];
            if (x.name != y.name || !same_number(x.value, y.value) || !same_number(x.threshold, y.threshold) ||
                x.comparison != y.comparison || x.pass != y.pass || x.note != y.note)
                return false;
        }
        return true;
    };
    return a.scenario_ == b.scenario_ && a.version_ == b.version_ && a.config_ == b.config_ && same_metrics() &&
           a.series_ == b.series_ && a.warnings_ == b.warnings_ && a.timings_ == b.timings_;
}

void write_report_json(const VerificationReport& report, const std::filesystem::path& path) {
    if (report.metrics().empty()) throw InvalidInput("refusing to emit a report without metrics");
    auto out = open_for_writing(path);
    out << report.to_json().dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

VerificationReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    try {
        return VerificationReport::from_json(nlohmann::ordered_json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("'" + path.string() + "': " + e.what());
    }
}

void write_report_csv(const VerificationReport& report, const std::filesystem::path& path) {
    if (report.metrics().empty()) throw InvalidInput("refusing to emit a report without metrics");
    auto out = open_for_writing(path);
    out << "name,value,threshold,comparison,pass\n";
    for (const auto& m : report.metrics())
        out << csv_field(m.name) << ',' << format_double(m.value) << ',' << format_double(m.threshold) << ','
            << to_string(m.comparison) << ',' << (m.pass ? "true" : "false") << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_plot_csv(const VerificationReport& report, const std::filesystem::path& path) {
    auto out = open_for_writing(path);
    out << "x,value,series\n";
    for (const auto& p : report.series())
        out << format_double(p.x) << ',' << format_double(p.value) << ',' << csv_field(p.series) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace pdo
