#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "specsense/signals.hpp"
#include "specsense/stream.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using testutil::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    double wall_seconds = 0.0;
};

std::string binary_path() {
    const char* b = std::getenv("SPECSENSE_BIN");
    REQUIRE_MESSAGE(b != nullptr, "SPECSENSE_BIN must point at the CLI binary");
    return b;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the CLI with a scrubbed SPECSENSE_SEED unless the caller injects one.
RunResult run_cli(const std::string& args, const std::string& env = "") {
    static TempDir io;
    static int counter = 0;
    const std::string out = io.file("out" + std::to_string(counter));
    const std::string err = io.file("err" + std::to_string(counter));
    ++counter;

    const std::string cmd = "env -u SPECSENSE_SEED " + env + (env.empty() ? "" : " ") +
                            binary_path() + " " + args + " >" + out + " 2>" + err;
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    const auto t1 = std::chrono::steady_clock::now();

    RunResult r;
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    r.exit_code = WEXITSTATUS(rc);
    r.out = slurp(out);
    r.err = slurp(err);
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

} // namespace

TEST_CASE("help exits cleanly and names every subcommand") {
    RunResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub : {"sense", "sweep", "calibrate", "selftest"}) {
        CHECK(testutil::contains(r.out, sub));
    }
}

TEST_CASE("bare invocation and unknown flags are config errors") {
    CHECK(run_cli("").exit_code == 11);
    CHECK(run_cli("frobnicate").exit_code == 11);
    CHECK(run_cli("sweep --no-such-flag 1").exit_code == 11);
    CHECK(run_cli("sense").exit_code == 11); // missing required input
}

TEST_CASE("selftest passes, reports per property, and is reproducible") {
    RunResult a = run_cli("selftest");
    CHECK(a.exit_code == 0);
    CHECK(count_lines(a.out) >= 5);
    CHECK(testutil::contains(a.out, "trace-monotonicity"));
    CHECK(testutil::contains(a.out, "trace-average-identity"));
    CHECK(testutil::contains(a.out, "scale-invariance"));
    CHECK(testutil::contains(a.out, "pfa-calibration"));
    CHECK(testutil::contains(a.out, "all properties pass"));
    CHECK_FALSE(testutil::contains(a.out, "FAIL"));

    RunResult b = run_cli("selftest");
    CHECK(a.out == b.out);
}

TEST_CASE("fault injection makes the selftest fail loudly") {
    RunResult r = run_cli("selftest --fault-injection threshold-sign");
    CHECK(r.exit_code == 12);
    CHECK(testutil::contains(r.out, "FAIL"));
}

TEST_CASE("smoke sweep finishes quickly with the pinned CSV schema") {
    TempDir tmp;
    const std::string csv = tmp.file("report.csv");
    RunResult r = run_cli("sweep --signal vsb_like --detectors fmd,mme --snr -40,20"
                          " --ns 507 --L 8 --Nk 50 --trials 100 --seed 3 --out " + csv);
    CHECK(r.exit_code == 0);
    CHECK(r.wall_seconds < 10.0);
    CHECK(testutil::contains(r.out, "wrote 4 rows"));

    const std::string body = slurp(csv);
    REQUIRE_FALSE(body.empty());
    CHECK(count_lines(body) == 5);
    CHECK(body.substr(0, body.find('\n')) ==
          "detector,signal,snr_db,ns,n_trials,pd,pd_lo,pd_hi,pfa_emp,threshold,"
          "mean_stat_h0,mean_stat_h1,failures");

    // The +20 dB FMD row detects every trial.
    CHECK(testutil::contains(body, "fmd,vsb_like,20,507,100,1,"));
}

TEST_CASE("sweeps are byte-identical for equal seeds however they arrive") {
    TempDir tmp;
    const std::string base = " --detectors fmd --snr -40 --ns 507 --L 8 --Nk 50"
                             " --trials 100 --out ";
    RunResult flag_run = run_cli("sweep" + base + tmp.file("a.csv") + " --seed 3");
    RunResult env_run = run_cli("sweep" + base + tmp.file("b.csv"), "SPECSENSE_SEED=3");
    RunResult other = run_cli("sweep" + base + tmp.file("c.csv") + " --seed 4");
    CHECK(flag_run.exit_code == 0);
    CHECK(env_run.exit_code == 0);
    CHECK(other.exit_code == 0);

    const std::string a = slurp(tmp.file("a.csv"));
    CHECK(a == slurp(tmp.file("b.csv")));
    CHECK(a != slurp(tmp.file("c.csv")));
}

TEST_CASE("long and JSON sweep outputs land next to the report") {
    TempDir tmp;
    RunResult r = run_cli("sweep --detectors fmd --snr -40 --ns 507 --L 8 --Nk 50"
                          " --trials 100 --seed 3 --out " + tmp.file("r.csv") +
                          " --long-out " + tmp.file("r_long.csv") +
                          " --json-out " + tmp.file("r.json"));
    CHECK(r.exit_code == 0);
    CHECK(count_lines(slurp(tmp.file("r_long.csv"))) == 5); // 4 metrics + header
    CHECK(testutil::contains(slurp(tmp.file("r.json")), "\"master_seed\": 3"));
}

TEST_CASE("config files feed the sweep with flag and env precedence") {
    TempDir tmp;
    const std::string cfg = tmp.file("sweep.cfg");
    {
        std::ofstream f(cfg);
        f << "# smoke geometry\n"
          << "detectors=fmd\n"
          << "snr=-40\n"
          << "ns=507\n"
          << "L=8\n"
          << "Nk=50\n"
          << "trials=100\n"
          << "seed=5\n"
          << "out=" << tmp.file("cfg.csv") << "\n";
    }

    RunResult from_cfg = run_cli("sweep --config " + cfg);
    CHECK(from_cfg.exit_code == 0);
    CHECK(testutil::contains(from_cfg.err, "seed=5"));

    RunResult flag_wins = run_cli("sweep --config " + cfg + " --seed 3");
    CHECK(flag_wins.exit_code == 0);
    CHECK(testutil::contains(flag_wins.err, "seed=3"));

    RunResult env_wins = run_cli("sweep --config " + cfg, "SPECSENSE_SEED=7");
    CHECK(env_wins.exit_code == 0);
    CHECK(testutil::contains(env_wins.err, "seed=7"));
}

TEST_CASE("config file errors are line precise") {
    TempDir tmp;
    const std::string bad = tmp.file("bad.cfg");
    {
        std::ofstream f(bad);
        f << "trials=100\nbogus_key=1\n";
    }
    RunResult r = run_cli("sweep --config " + bad);
    CHECK(r.exit_code == 11);
    CHECK(testutil::contains(r.err, ":2:"));
    CHECK(testutil::contains(r.err, "bogus_key"));

    const std::string malformed = tmp.file("malformed.cfg");
    {
        std::ofstream f(malformed);
        f << "just-some-words\n";
    }
    RunResult m = run_cli("sweep --config " + malformed);
    CHECK(m.exit_code == 11);
    CHECK(testutil::contains(m.err, ":1:"));

    CHECK(run_cli("sweep --config " + tmp.file("missing.cfg")).exit_code == 11);
}

TEST_CASE("plan validation failures surface as config errors") {
    CHECK(run_cli("sweep --detectors fmd --snr -40 --ns 507 --L 8 --Nk 50 --trials 50")
              .exit_code == 11);
    CHECK(run_cli("sweep --detectors fmd --snr -40 --ns 100 --trials 100").exit_code == 11);
}

TEST_CASE("calibrate writes a reproducible threshold table") {
    TempDir tmp;
    const std::string t1 = tmp.file("thr1.txt");
    const std::string t2 = tmp.file("thr2.txt");
    const std::string args = "calibrate --L 8 --K 10 --Nk 50 --detectors mme,agm"
                             " --pfa 0.1 --trials 600 --seed 1 --out ";
    RunResult a = run_cli(args + t1);
    CHECK(a.exit_code == 0);
    CHECK(testutil::contains(a.out, "mme "));
    CHECK(testutil::contains(a.out, "agm "));
    CHECK(testutil::contains(a.out, "fmd "));
    CHECK(testutil::contains(a.out, "analytic"));

    RunResult b = run_cli(args + t2);
    CHECK(b.exit_code == 0);
    CHECK(slurp(t1) == slurp(t2));
    CHECK(testutil::contains(slurp(t1), "# empirical thresholds"));
}

TEST_CASE("sense stays quiet on zeros with known noise power") {
    TempDir tmp;
    const std::string bin = tmp.file("zeros.bin");
    {
        specsense::SampleStream s;
        s.samples.assign(1231, 0.0);
        specsense::write_samples_f32le(bin, s);
    }
    RunResult r = run_cli("sense " + bin +
                          " --detectors fmd --noise-mode external --sigma2 1");
    CHECK(r.exit_code == 0);
    CHECK(testutil::contains(r.out, "fmd: statistic=0"));
    CHECK(testutil::contains(r.out, "decision=signal_absent"));
}

TEST_CASE("sense fires on a strong correlated capture") {
    TempDir tmp;
    const std::string bin = tmp.file("sig.bin");
    {
        specsense::SignalSpec spec; // vsb_like
        specsense::SampleStream s = specsense::generate_signal(spec, 20000, 5);
        specsense::write_samples_f32le(bin, specsense::add_awgn(s, 0.0, 6));
    }
    RunResult r = run_cli("sense " + bin +
                          " --L 8 --Nk 50 --detectors fmd --noise-mode external --sigma2 1");
    CHECK(r.exit_code == 10);
    CHECK(testutil::contains(r.out, "decision=signal_present"));
}

TEST_CASE("sense baselines require a threshold table and honour it") {
    TempDir tmp;
    const std::string noise_bin = tmp.file("noise.bin");
    {
        specsense::write_samples_f32le(noise_bin, specsense::generate_noise(507, 1.0, 42));
    }

    RunResult missing = run_cli("sense " + noise_bin + " --L 8 --Nk 50 --detectors mme");
    CHECK(missing.exit_code == 11);

    const std::string table = tmp.file("thr.txt");
    RunResult cal = run_cli("calibrate --L 8 --K 10 --Nk 50 --detectors mme --pfa 0.1"
                            " --trials 600 --seed 1 --out " + table);
    REQUIRE(cal.exit_code == 0);

    RunResult sensed = run_cli("sense " + noise_bin +
                               " --L 8 --Nk 50 --detectors mme --thresholds " + table);
    CHECK((sensed.exit_code == 0 || sensed.exit_code == 10));
    CHECK(testutil::contains(sensed.out, "mme: statistic="));
}

TEST_CASE("sense input failures exit as runtime errors") {
    TempDir tmp;
    const std::string trunc = tmp.file("trunc.bin");
    {
        std::FILE* f = std::fopen(trunc.c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fwrite("abcdef", 1, 6, f);
        std::fclose(f);
    }
    CHECK(run_cli("sense " + trunc + " --detectors fmd").exit_code == 12);
    CHECK(run_cli("sense " + tmp.file("missing.bin") + " --detectors fmd").exit_code == 12);
}

TEST_CASE("sense rejects invalid option values as config errors") {
    TempDir tmp;
    const std::string bin = tmp.file("x.bin");
    specsense::write_samples_f32le(bin, specsense::generate_noise(507, 1.0, 1));

    CHECK(run_cli("sense " + bin + " --noise-mode bogus").exit_code == 11);
    CHECK(run_cli("sense " + bin + " --format weird").exit_code == 11);
    CHECK(run_cli("sense " + bin + " --L 8 --Nk 50 --detectors ftm").exit_code == 11);
}

TEST_CASE("text captures work through the format switch") {
    TempDir tmp;
    const std::string txt = tmp.file("cap.txt");
    specsense::write_samples_text(txt, specsense::generate_noise(507, 1.0, 9));

    RunResult r = run_cli("sense " + txt +
                          " --L 8 --Nk 50 --detectors fmd --noise-mode external --sigma2 1");
    CHECK((r.exit_code == 0 || r.exit_code == 10));
    CHECK(testutil::contains(r.out, "fmd: statistic="));
}
