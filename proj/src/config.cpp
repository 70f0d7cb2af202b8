#include "qmem/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qmem {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fnv1a_hex(const std::string& text) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << h;
    return ss.str();
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"run", {"mode"}},
    {"storage",
     {"gamma", "length", "c", "c_prime", "k", "k_prime", "d", "mu0", "n0",
      "omega_char"}},
    {"retrieval",
     {"gamma", "length", "c", "c_prime", "k", "k_prime", "d", "mu0", "n0",
      "omega_char"}},
    {"distribution", {"shape", "width", "center", "table"}},
    {"distribution_storage", {"shape", "width", "center", "table"}},
    {"excitation", {"width", "t_c", "table", "zero"}},
    {"input", {"width", "center", "t_emit"}},
    {"grid", {"half_width", "points"}},
    {"protocol",
     {"map", "kernel", "t_storage", "delta_t", "t0", "include_propagation_phase",
      "oracle_case", "nz", "n_delta", "cfl", "record_window"}},
    {"sweep", {"parameter", "from", "to", "points", "scale"}},
    {"output", {"directory", "precision"}},
};

} // namespace

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    ini.hash_ = fnv1a_hex(text);
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("unterminated section header", line_no);
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value", line_no);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (section.empty())
            throw ConfigError("key outside of any section", line_no);
        auto known = kKnownKeys.find(section);
        if (known == kKnownKeys.end())
            throw ConfigError("unknown section [" + section + "]", line_no);
        if (!known->second.count(key))
            throw ConfigError("unknown key '" + key + "' in [" + section + "]",
                              line_no);
        auto [it, inserted] = ini.sections_[section].emplace(key, Entry{value, line_no});
        if (!inserted)
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]",
                              line_no);
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool IniFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return it->second.at(key).value;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

int IniFile::line_of(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key)) return 0;
    return it->second.at(key).line;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' is not a number: " + v,
                          line_of(section, key));
    }
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int IniFile::get_int_or(const std::string& section, const std::string& key,
                        int fallback) const {
    if (!has(section, key)) return fallback;
    const double x = get_double(section, key);
    const int n = static_cast<int>(x);
    if (x != n)
        throw ConfigError("key '" + key + "' must be an integer",
                          line_of(section, key));
    return n;
}

bool IniFile::get_bool_or(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "' is not a boolean: " + v,
                      line_of(section, key));
}

SpectralProfile DistributionSpec::build() const {
    if (!table.empty()) return SpectralProfile::from_file(table);
    return make_profile(shape, width, center);
}

namespace {

TransitionSpec read_transition(const IniFile& ini, const std::string& section) {
    TransitionSpec t;
    t.gamma = ini.get_double(section, "gamma");
    t.length = ini.get_double(section, "length");
    t.c = ini.get_double_or(section, "c", 1.0);
    t.c_prime = ini.get_double_or(section, "c_prime", t.c);
    t.k = ini.get_double_or(section, "k", 0.0);
    t.k_prime = ini.get_double_or(section, "k_prime", t.k);
    const bool has_d = ini.has(section, "d");
    const bool has_mu0 = ini.has(section, "mu0");
    if (has_d && has_mu0)
        throw ConfigError("[" + section +
                              "] sets both 'd' and 'mu0'; exactly one is allowed",
                          ini.line_of(section, "mu0"));
    if (!has_d && !has_mu0)
        throw ConfigError("[" + section + "] must set exactly one of 'd' or 'mu0'");
    if (has_d) t.d = ini.get_double(section, "d");
    if (has_mu0) {
        t.mu0 = ini.get_double(section, "mu0");
        if (!ini.has(section, "n0"))
            throw ConfigError("[" + section + "] 'mu0' requires 'n0'");
        t.n0 = ini.get_double(section, "n0");
    }
    if (ini.has(section, "omega_char"))
        t.omega_char = ini.get_double(section, "omega_char");
    return t;
}

DistributionSpec read_distribution(const IniFile& ini, const std::string& section) {
    DistributionSpec d;
    d.table = ini.get_or(section, "table", "");
    if (d.table.empty()) {
        d.shape = profile_shape_from_string(ini.get_or(section, "shape", "gaussian"));
        d.width = ini.get_double(section, "width");
        d.center = ini.get_double_or(section, "center", 0.0);
        if (!(d.width > 0.0))
            throw ConfigError("[" + section + "] width must be positive",
                              ini.line_of(section, "width"));
    }
    return d;
}

} // namespace

SimConfig SimConfig::from_ini(const IniFile& ini) {
    SimConfig cfg;
    cfg.config_hash = ini.hash();

    const std::string mode = ini.get_or("run", "mode", "transduce");
    if (mode == "retrieve")
        cfg.pipeline = PipelineKind::retrieve;
    else if (mode == "transduce")
        cfg.pipeline = PipelineKind::transduce;
    else if (mode == "oracle-compare")
        cfg.pipeline = PipelineKind::oracle_compare;
    else
        throw ConfigError("unknown mode '" + mode + "'", ini.line_of("run", "mode"));

    cfg.retrieval = read_transition(ini, "retrieval");
    cfg.has_storage_block = ini.has_section("storage");
    if (cfg.has_storage_block) cfg.storage = read_transition(ini, "storage");

    cfg.dist_retrieval = read_distribution(ini, "distribution");
    cfg.has_storage_dist = ini.has_section("distribution_storage");
    if (cfg.has_storage_dist)
        cfg.dist_storage = read_distribution(ini, "distribution_storage");
    else
        cfg.dist_storage = cfg.dist_retrieval;

    if (ini.has_section("excitation")) {
        cfg.excitation_zero = ini.get_bool_or("excitation", "zero", false);
        cfg.excitation_table = ini.get_or("excitation", "table", "");
        if (!cfg.excitation_zero && cfg.excitation_table.empty()) {
            cfg.excitation_width = ini.get_double("excitation", "width");
            cfg.excitation_t = ini.get_double_or("excitation", "t_c", 0.0);
        }
    } else if (cfg.pipeline == PipelineKind::transduce) {
        throw ConfigError("mode 'transduce' requires an [excitation] section");
    }

    if (ini.has_section("input")) {
        cfg.input_width = ini.get_double("input", "width");
        cfg.input_center = ini.get_double_or("input", "center", 0.0);
        cfg.input_t_emit = ini.get_double_or("input", "t_emit", 0.0);
    } else if (cfg.pipeline == PipelineKind::retrieve) {
        throw ConfigError("mode 'retrieve' requires an [input] section");
    }

    cfg.grid_half_width = ini.get_double("grid", "half_width");
    cfg.grid_points = ini.get_int_or("grid", "points", 0);
    if (cfg.grid_points < 3 || cfg.grid_points % 2 == 0)
        throw ConfigError("[grid] points must be an odd number >= 3",
                          ini.line_of("grid", "points"));
    if (!(cfg.grid_half_width > 0.0))
        throw ConfigError("[grid] half_width must be positive",
                          ini.line_of("grid", "half_width"));

    cfg.map_kind = ini.get_or("protocol", "map", "negate");
    if (cfg.map_kind != "negate" && cfg.map_kind != "identity" &&
        cfg.map_kind != "uncorrelated")
        throw ConfigError("unknown map '" + cfg.map_kind + "'",
                          ini.line_of("protocol", "map"));
    cfg.kernel_kind = ini.get_or("protocol", "kernel", "general");
    if (cfg.kernel_kind != "general" && cfg.kernel_kind != "crib_uniform" &&
        cfg.kernel_kind != "ideal")
        throw ConfigError("unknown kernel '" + cfg.kernel_kind + "'",
                          ini.line_of("protocol", "kernel"));
    cfg.t_storage = ini.get_double_or("protocol", "t_storage", 0.0);
    cfg.delta_t = ini.get_double_or("protocol", "delta_t", 0.0);
    cfg.t0 = ini.get_double_or("protocol", "t0", 0.0);
    cfg.include_propagation_phase =
        ini.get_bool_or("protocol", "include_propagation_phase", false);
    cfg.oracle_case = ini.get_or("protocol", "oracle_case", "storage");
    if (cfg.oracle_case != "storage" && cfg.oracle_case != "crib" &&
        cfg.oracle_case != "transduce")
        throw ConfigError("unknown oracle_case '" + cfg.oracle_case + "'",
                          ini.line_of("protocol", "oracle_case"));
    cfg.oracle_nz = ini.get_int_or("protocol", "nz", 256);
    cfg.oracle_n_delta = ini.get_int_or("protocol", "n_delta", 96);
    cfg.oracle_cfl = ini.get_double_or("protocol", "cfl", 0.9);
    cfg.record_window = ini.get_double_or("protocol", "record_window", 0.0);

    cfg.has_sweep = ini.has_section("sweep");
    if (cfg.has_sweep) {
        cfg.sweep_parameter = ini.get_or("sweep", "parameter", "d");
        if (cfg.sweep_parameter != "d")
            throw ConfigError("only optical-depth sweeps are supported",
                              ini.line_of("sweep", "parameter"));
        cfg.sweep_from = ini.get_double("sweep", "from");
        cfg.sweep_to = ini.get_double("sweep", "to");
        cfg.sweep_points = ini.get_int_or("sweep", "points", 1);
        if (cfg.sweep_points < 1)
            throw ConfigError("[sweep] points must be >= 1",
                              ini.line_of("sweep", "points"));
        const std::string scale = ini.get_or("sweep", "scale", "linear");
        if (scale == "log")
            cfg.sweep_log = true;
        else if (scale != "linear")
            throw ConfigError("unknown sweep scale '" + scale + "'",
                              ini.line_of("sweep", "scale"));
        if (cfg.sweep_log && !(cfg.sweep_from > 0.0 && cfg.sweep_to > 0.0))
            throw ConfigError("log sweeps need positive endpoints");
    }

    cfg.out_dir = ini.get_or("output", "directory", "out");
    cfg.precision = ini.get_int_or("output", "precision", 12);
    if (cfg.precision < 3 || cfg.precision > 17)
        throw ConfigError("[output] precision must lie in [3, 17]",
                          ini.line_of("output", "precision"));
    return cfg;
}

SimConfig SimConfig::load(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
}

} // namespace qmem
