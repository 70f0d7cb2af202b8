#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmem/profile.hpp"
#include "qmem/transition.hpp"

namespace qmem {

// Configuration problem anchored to a source line (0 = no specific line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Sectioned key=value text.
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key,
                   int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key,
                     bool fallback) const;
    int line_of(const std::string& section, const std::string& key) const;

    // Stable 64-bit FNV-1a digest of the source text, as hex.
    const std::string& hash() const { return hash_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string hash_;
};

enum class PipelineKind { retrieve, transduce, oracle_compare };

struct DistributionSpec {
    ProfileShape shape = ProfileShape::gaussian;
    double width = 1.0;
    double center = 0.0;
    std::string table; // overrides the closed-form shape when set

    SpectralProfile build() const;
};

// Fully validated simulation configuration.
struct SimConfig {
    PipelineKind pipeline = PipelineKind::transduce;

    TransitionSpec storage;
    TransitionSpec retrieval;
    bool has_storage_block = false;

    DistributionSpec dist_retrieval;
    DistributionSpec dist_storage;
    bool has_storage_dist = false;

    // transducer excitation f(Delta)
    double excitation_width = 1.0;
    double excitation_t = 0.0;
    std::string excitation_table;
    bool excitation_zero = false;

    // retrieve-mode input photon
    double input_width = 1.0;
    double input_center = 0.0;
    double input_t_emit = 0.0;

    double grid_half_width = 0.0;
    int grid_points = 0;

    std::string map_kind = "negate";      // negate | identity | uncorrelated
    std::string kernel_kind = "general";  // general | crib_uniform | ideal
    double t_storage = 0.0;
    double delta_t = 0.0;
    double t0 = 0.0;
    bool include_propagation_phase = false;
    std::string oracle_case = "storage";  // storage | crib | transduce
    int oracle_nz = 256;
    int oracle_n_delta = 96;
    double oracle_cfl = 0.9;
    double record_window = 0.0;

    bool has_sweep = false;
    std::string sweep_parameter = "d";
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    int sweep_points = 0;
    bool sweep_log = false;

    std::string out_dir = "out";
    int precision = 12;

    std::string config_hash;

    static SimConfig from_ini(const IniFile& ini);
    static SimConfig load(const std::string& path);
};

} // namespace qmem
