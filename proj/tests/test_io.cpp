#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nnls/io.hpp"
#include "test_util.hpp"

using namespace nnls;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse_config") {
    SUBCASE("minimal soliton run") {
        const auto cfg = parse_config(
            "equation = focusing\n"
            "initial = soliton\n"
            "omega = 1.0\n"
            "t_end = 1\n");
        CHECK(cfg.equation == SignFlag::focusing);
        CHECK(std::holds_alternative<SolitonParams>(cfg.initial));
        CHECK(cfg.grid_l_auto);
        CHECK(cfg.grid_l == Approx(40.0));  // 40 / sqrt(omega)
        CHECK(cfg.t_end == Approx(1.0));
        CHECK(cfg.stepper.dt0 == Approx(1e-3));
    }

    SUBCASE("comments, blank lines, full stepper block") {
        const auto cfg = parse_config(
            "# run description\n"
            "initial = one_param\n"
            "alpha = 0.25   # slow decay\n"
            "\n"
            "grid_n = 8192\n"
            "grid_l = auto\n"
            "scheme = if_rk4\n"
            "dt0 = 5e-4\n"
            "adaptive = false\n"
            "dealias = false\n"
            "monitor_stride = 3\n"
            "t_end = 2.5\n");
        CHECK(cfg.grid_n == 8192);
        CHECK(cfg.grid_l == Approx(160.0));  // 40 / 0.25
        CHECK(cfg.stepper.scheme == Scheme::if_rk4);
        CHECK(cfg.stepper.dt0 == Approx(5e-4));
        CHECK_FALSE(cfg.stepper.adaptive);
        CHECK_FALSE(cfg.stepper.dealias);
        CHECK(cfg.stepper.monitor_stride == 3);
    }

    SUBCASE("conflicting initial data") {
        CHECK_THROWS_WITH_AS(parse_config("samples_file = u.txt\n"
                                          "initial = soliton\n"
                                          "omega = 1\n"),
                             doctest::Contains("conflicting initial data"), ConfigError);
    }

    SUBCASE("grid_n must be a power of two") {
        CHECK_THROWS_WITH_AS(parse_config("initial = soliton\nomega = 1\ngrid_n = 1000\n"),
                             doctest::Contains("power of two"), ConfigError);
    }

    SUBCASE("unknown keys are line-anchored errors") {
        CHECK_THROWS_WITH_AS(parse_config("initial = soliton\nomega = 1\nfrobnicate = 3\n"),
                             doctest::Contains("line 3"), ConfigError);
    }

    SUBCASE("duplicate keys are errors") {
        CHECK_THROWS_AS(parse_config("initial = soliton\nomega = 1\nomega = 2\n"), ConfigError);
    }

    SUBCASE("missing kind parameter") {
        CHECK_THROWS_WITH_AS(parse_config("initial = two_param\nalpha = 1\n"),
                             doctest::Contains("beta"), ConfigError);
    }

    SUBCASE("an initial-data source is required") {
        CHECK_THROWS_AS(parse_config("t_end = 1\n"), ConfigError);
    }

    SUBCASE("flag overrides replace file values") {
        const auto cfg = parse_config("initial = soliton\nomega = 1\nt_end = 1\n",
                                      {{"t_end", "4"}, {"scheme", "if_rk4"}});
        CHECK(cfg.t_end == Approx(4.0));
        CHECK(cfg.stepper.scheme == Scheme::if_rk4);
        CHECK_THROWS_AS(parse_config("initial = soliton\nomega = 1\n", {{"bogus", "1"}}),
                        ConfigError);
    }

    SUBCASE("auto length caps at 160") {
        const auto cfg = parse_config("initial = one_param\nalpha = 0.1\n");
        CHECK(cfg.grid_l == Approx(160.0));
    }

    SUBCASE("default output directory comes from the environment") {
        setenv(kOutputDirEnvVar, "/tmp/nnls_env_dir", 1);
        const auto cfg = parse_config("initial = soliton\nomega = 1\n");
        CHECK(cfg.output_dir == "/tmp/nnls_env_dir");
        unsetenv(kOutputDirEnvVar);
        const auto cfg2 = parse_config("initial = soliton\nomega = 1\n");
        CHECK(cfg2.output_dir == ".");
        const auto cfg3 = parse_config("initial = soliton\nomega = 1\noutput_dir = here\n");
        CHECK(cfg3.output_dir == "here");
    }
}

TEST_CASE("identical runs produce byte-identical time series") {
    auto g = make_grid(256, 20.0);
    StepperConfig cfg;
    cfg.monitor_stride = 5;
    const SpectralField u0 = sample_exact(SolitonParams{1.0}, 0.0, g);
    const TrajectoryRecord a = run(u0, 0.2, cfg, SignFlag::focusing);
    const TrajectoryRecord b = run(u0, 0.2, cfg, SignFlag::focusing);
    const std::string pa = temp_path("nnls_det_a.csv");
    const std::string pb = temp_path("nnls_det_b.csv");
    write_timeseries(a, pa);
    write_timeseries(b, pb);
    CHECK(slurp(pa) == slurp(pb));
    std::filesystem::remove(pa);
    std::filesystem::remove(pb);
}

TEST_CASE("format_double round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 2.0943951023931953, 1e-300, 4.0, -0.0, 6.62607015e-34}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("write_timeseries") {
    TrajectoryRecord rec;
    rec.termination = Termination::blowup_detected;
    rec.final_time = 1.9;
    rec.blowup_estimate = BlowupEstimate{2.0000000000000004, 1.25e-7};
    for (int i = 0; i <= 8; ++i) {
        InvariantSample s;
        s.time = 1.5 + 0.05 * i;
        s.sup_norm = 1.0 / (2.0 - s.time);
        s.Q = Complex(2.0943951023931953, 1e-17);
        s.E = Complex(-2.0 / 3.0, 0.0);
        s.l2 = 2.0;
        s.h1 = 2.3;
        rec.samples.push_back(s);
    }
    const std::string path = temp_path("nnls_ts_test.csv");
    write_timeseries(rec, path);
    const std::string body = slurp(path);

    CHECK(body.rfind("t,sup_norm,re_Q,im_Q,re_E,im_E,l2,h1\n", 0) == 0);
    CHECK(body.find("# termination=blowup_detected\n") != std::string::npos);
    CHECK(body.find("# blowup_estimate=2.0000000000000004\n") != std::string::npos);
    CHECK(body.find("2.0943951023931953") != std::string::npos);  // 17-digit round trip

    SUBCASE("byte-identical on rewrite") {
        const std::string path2 = temp_path("nnls_ts_test2.csv");
        write_timeseries(rec, path2);
        CHECK(slurp(path2) == body);
    }
    std::filesystem::remove(path);
}

TEST_CASE("report round trip") {
    ExperimentReport rep;
    rep.name = "demo";
    rep.put_input("alpha", 0.75);
    rep.put_setting("grid_n", "4096");
    rep.put_setting("scheme", "strang_pair_rk4");
    rep.put_metric("blowup_estimate", 1.8620266272427266);
    rep.put_metric("blowup_rel_err", 0.000183754);
    rep.put_tolerance("blowup_rel_err", 0.05);
    rep.verdict = Verdict::pass;
    rep.artifacts.push_back("demo_run.csv");

    const std::string path = temp_path("nnls_report_test.json");
    write_report(rep, path);
    const ExperimentReport back = read_report(path);
    CHECK(back == rep);

    SUBCASE("byte-identical on rewrite") {
        const std::string body = slurp(path);
        write_report(rep, path);
        CHECK(slurp(path) == body);
    }

    SUBCASE("schema violations are rejected") {
        std::ofstream out(path, std::ios::trunc);
        out << "{\"name\": \"demo\", \"metrics\": {}}\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_report(path), doctest::Contains("schema"),
                             std::runtime_error);
    }

    SUBCASE("verdict strings") {
        rep.verdict = Verdict::informational;
        write_report(rep, path);
        CHECK(read_report(path).verdict == Verdict::informational);
    }
    std::filesystem::remove(path);
}

TEST_CASE("samples file round trip") {
    auto g = make_grid(16, 4.0);
    const std::string path = temp_path("nnls_samples_test.txt");
    {
        std::ofstream out(path, std::ios::trunc);
        out << "# initial data\n";
        for (int j = 0; j < 16; ++j) out << 0.25 * j << " " << -0.5 * j << "\n";
    }
    const SpectralField f = read_samples_file(path, g);
    CHECK(f.samples[3] == Complex(0.75, -1.5));
    CHECK(f.time == 0.0);

    SUBCASE("wrong sample count") {
        auto g2 = make_grid(32, 4.0);
        CHECK_THROWS_WITH_AS(read_samples_file(path, g2), doctest::Contains("expected 32"),
                             std::runtime_error);
    }
    std::filesystem::remove(path);
}
