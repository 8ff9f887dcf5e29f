#include "core/config_file.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace gradcode {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception &) {
        throw ArgumentError("config: invalid integer for " + key + ": '" + value + "'");
    }
}

std::vector<double> parse_theta_list(const std::string &value) {
    std::vector<double> theta;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t used = 0;
            theta.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception &) {
            throw ArgumentError("config: invalid theta entry '" + item + "'");
        }
    }
    if (theta.empty()) throw ArgumentError("config: empty theta list");
    return theta;
}

}  // namespace

SchemeConfig parse_scheme_config(const std::string &text) {
    SchemeConfig cfg;
    bool saw_n = false, saw_d = false;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config: line " + std::to_string(line_no) + " is not key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "n") {
            cfg.n = parse_int(key, value);
            saw_n = true;
        } else if (key == "d") {
            cfg.d = parse_int(key, value);
            saw_d = true;
        } else if (key == "s") {
            cfg.s = parse_int(key, value);
        } else if (key == "m") {
            cfg.m = parse_int(key, value);
        } else if (key == "l") {
            cfg.l = parse_int(key, value);
        } else if (key == "theta") {
            if (value == "auto") {
                cfg.theta_auto = true;
                cfg.theta.clear();
            } else {
                cfg.theta_auto = false;
                cfg.theta = parse_theta_list(value);
            }
        } else {
            throw ArgumentError("config: unknown key '" + key + "'");
        }
    }
    if (!saw_n || !saw_d) throw ArgumentError("config: keys n and d are required");
    if (cfg.s < 0) cfg.s = cfg.d - cfg.m;
    if (!cfg.theta_auto && static_cast<int>(cfg.theta.size()) != cfg.n)
        throw ArgumentError("config: theta list must have exactly n entries");
    return cfg;
}

SchemeConfig load_scheme_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scheme_config(buffer.str());
}

}  // namespace gradcode
