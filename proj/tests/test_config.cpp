#include <doctest.h>

#include <cmath>
#include <string>

#include "qmem/config.hpp"
#include "qmem/pipeline.hpp"

using namespace qmem;

namespace {

const std::string kTransduceIni =
    "[run]\n"
    "mode = transduce\n"
    "[retrieval]\n"
    "gamma = 0.0628318530717959\n"
    "length = 0.01\n"
    "c = 0.01\n"
    "d = 2\n"
    "omega_char = -188.495559215388\n"
    "[distribution]\n"
    "shape = gaussian\n"
    "width = 6.28318530717959\n"
    "[excitation]\n"
    "width = 18.8495559215388\n"
    "t_c = 1\n"
    "[grid]\n"
    "half_width = 120\n"
    "points = 1201\n";

} // namespace

TEST_CASE("a minimal transduce configuration parses with defaults") {
    const SimConfig cfg = SimConfig::from_ini(IniFile::parse_string(kTransduceIni));
    CHECK(cfg.pipeline == PipelineKind::transduce);
    CHECK(cfg.retrieval.d.value() == 2.0);
    CHECK(cfg.dist_retrieval.shape == ProfileShape::gaussian);
    CHECK(cfg.excitation_t == 1.0);
    CHECK(cfg.grid_points == 1201);
    CHECK(cfg.map_kind == "negate");
    CHECK(cfg.kernel_kind == "general");
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.precision == 12);
    CHECK(!cfg.config_hash.empty());
}

TEST_CASE("setting both d and mu0 is rejected with both keys named") {
    std::string text = kTransduceIni;
    text.insert(text.find("omega_char"), "mu0 = 1\nn0 = 1\n");
    try {
        SimConfig::from_ini(IniFile::parse_string(text));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("'d'") != std::string::npos);
        CHECK(what.find("'mu0'") != std::string::npos);
    }
}

TEST_CASE("mu0 without n0 is rejected") {
    std::string text = kTransduceIni;
    const size_t pos = text.find("d = 2\n");
    text.replace(pos, 6, "mu0 = 1\n");
    CHECK_THROWS_AS(SimConfig::from_ini(IniFile::parse_string(text)), ConfigError);
}

TEST_CASE("unknown sections, keys, and malformed lines are line-anchored errors") {
    CHECK_THROWS_AS(IniFile::parse_string("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse_string("[grid]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse_string("[grid]\nhalf_width\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse_string("key = 1\n"), ConfigError);
    try {
        IniFile::parse_string("[grid]\n[grid\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("grid validation requires an odd point count and positive width") {
    std::string even = kTransduceIni;
    even.replace(even.find("points = 1201"), 13, "points = 1200");
    CHECK_THROWS_AS(SimConfig::from_ini(IniFile::parse_string(even)), ConfigError);
    std::string bad = kTransduceIni;
    bad.replace(bad.find("half_width = 120"), 16, "half_width = -1 ");
    CHECK_THROWS_AS(SimConfig::from_ini(IniFile::parse_string(bad)), ConfigError);
}

TEST_CASE("only optical-depth sweeps are accepted") {
    std::string text = kTransduceIni +
                       "[sweep]\nparameter = gamma\nfrom = 1\nto = 2\npoints = 3\n";
    CHECK_THROWS_AS(SimConfig::from_ini(IniFile::parse_string(text)), ConfigError);
}

TEST_CASE("log sweeps require positive endpoints") {
    std::string text = kTransduceIni +
                       "[sweep]\nfrom = 0\nto = 2\npoints = 3\nscale = log\n";
    CHECK_THROWS_AS(SimConfig::from_ini(IniFile::parse_string(text)), ConfigError);
}

TEST_CASE("the config hash is stable and content-sensitive") {
    const IniFile a = IniFile::parse_string(kTransduceIni);
    const IniFile b = IniFile::parse_string(kTransduceIni);
    CHECK(a.hash() == b.hash());
    std::string text = kTransduceIni;
    text.replace(text.find("d = 2"), 5, "d = 3");
    CHECK(IniFile::parse_string(text).hash() != a.hash());
}

TEST_CASE("a zeroed excitation yields a zero-probability report") {
    std::string text = kTransduceIni;
    text.replace(text.find("[excitation]\nwidth = 18.8495559215388\nt_c = 1\n"),
                 46, "[excitation]\nzero = true\n");
    const SimConfig cfg = SimConfig::from_ini(IniFile::parse_string(text));
    CHECK(cfg.excitation_zero);
    const RunResult result = run_simulation(cfg);
    CHECK(result.metrics.retrieval_probability == 0.0);
    CHECK(result.metrics.efficiency == 0.0);
}

TEST_CASE("identical configurations produce bit-identical output text") {
    const SimConfig cfg = SimConfig::from_ini(IniFile::parse_string(kTransduceIni));
    const RunResult a = run_simulation(cfg);
    const RunResult b = run_simulation(cfg);
    CHECK(a.spectrum_csv() == b.spectrum_csv());
    CHECK(a.spectrum_csv().rfind("# config=" + cfg.config_hash, 0) == 0);
    CHECK(a.spectrum_csv().find("omega,re_E,im_E,abs2_E") != std::string::npos);
}

TEST_CASE("a single-point sweep at zero depth reports zero probability") {
    std::string text = kTransduceIni + "[sweep]\nfrom = 0\nto = 0\npoints = 1\n";
    const SimConfig cfg = SimConfig::from_ini(IniFile::parse_string(text));
    const std::string csv = run_sweep(cfg);
    // comment line, header, exactly one data row
    CHECK(csv.rfind("# config=", 0) == 0);
    const size_t header = csv.find('\n') + 1;
    const size_t row = csv.find('\n', header) + 1;
    const std::string data = csv.substr(row);
    CHECK(data.rfind("0,0,", 0) == 0);
    CHECK(csv.find('\n', row) == csv.size() - 1);
}

TEST_CASE("sweeps are deterministic and ascending regardless of thread count") {
    std::string text = kTransduceIni +
                       "[sweep]\nfrom = 0.5\nto = 4\npoints = 6\nscale = log\n";
    const SimConfig cfg = SimConfig::from_ini(IniFile::parse_string(text));
    RunOptions serial, parallel;
    parallel.threads = 4;
    const std::string a = run_sweep(cfg, serial);
    const std::string b = run_sweep(cfg, parallel);
    CHECK(a == b);
    double prev = -1.0;
    std::istringstream in(a);
    std::string line;
    std::getline(in, line); // hash comment
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        const double d = std::stod(line);
        CHECK(d > prev);
        prev = d;
    }
}
