#include "toposeg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "toposeg/io.hpp"

namespace toposeg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw std::invalid_argument("config: key '" + std::string(key) +
                                    "' expects a number, got '" + std::string(value) + "'");
    }
    return out;
}

int parse_int(std::string_view key, std::string_view value) {
    int out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw std::invalid_argument("config: key '" + std::string(key) +
                                    "' expects an integer, got '" + std::string(value) + "'");
    }
    return out;
}

}  // namespace

ToolConfig parse_config_text(std::string_view text) {
    ToolConfig cfg;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        const std::size_t line_end = text.find('\n', line_start);
        std::string_view line = text.substr(
            line_start, line_end == std::string_view::npos ? std::string_view::npos
                                                           : line_end - line_start);
        line_start = line_end == std::string_view::npos ? text.size() + 1 : line_end + 1;

        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config: expected key=value, got '" + std::string(line) +
                                        "'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "threshold") {
            cfg.eval.threshold = parse_double(key, value);
            if (!(cfg.eval.threshold > 0.0) || !(cfg.eval.threshold < 1.0)) {
                throw std::invalid_argument("config: threshold must lie strictly in (0,1)");
            }
        } else if (key == "bf1_tolerance") {
            cfg.eval.bf1_tolerance = parse_int(key, value);
            if (cfg.eval.bf1_tolerance < 0) {
                throw std::invalid_argument("config: bf1_tolerance must be non-negative");
            }
        } else if (key == "pd.kind") {
            if (value == "wasserstein") {
                cfg.eval.pd.kind = DiagramDistanceKind::wasserstein;
            } else if (value == "bottleneck") {
                cfg.eval.pd.kind = DiagramDistanceKind::bottleneck;
            } else {
                throw std::invalid_argument(
                    "config: pd.kind must be 'wasserstein' or 'bottleneck'");
            }
        } else if (key == "pd.q") {
            cfg.eval.pd.q = parse_double(key, value);
            if (!(cfg.eval.pd.q >= 1.0)) {
                throw std::invalid_argument("config: pd.q must be >= 1");
            }
        } else if (key == "select.k") {
            cfg.select_k = parse_int(key, value);
            if (cfg.select_k < 1) {
                throw std::invalid_argument("config: select.k must be at least 1");
            }
        } else if (key == "workers") {
            cfg.workers = parse_int(key, value);
            if (cfg.workers < 1) {
                throw std::invalid_argument("config: workers must be at least 1");
            }
        } else {
            throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

ToolConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path, "cannot open for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace toposeg
