#pragma once

#include <string>
#include <vector>

namespace gradcode {

/// Parsed scheme configuration (UTF-8 key=value lines). Keys: n, d, s, m, l,
/// theta (comma-separated list or "auto"). s defaults to d - m when absent.
struct SchemeConfig {
    int n = 0;
    int d = 0;
    int s = -1;
    int m = 1;
    int l = 1;
    bool theta_auto = true;
    std::vector<double> theta;
};

SchemeConfig parse_scheme_config(const std::string &text);
SchemeConfig load_scheme_config(const std::string &path);

}  // namespace gradcode
