#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(NONHOLO_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("verify passes for all built-in models") {
    for (const char* model : {"particle", "integrable"}) {
        RunResult r = run(std::string("verify --model ") + model + " --seed 7");
        INFO(r.out);
        REQUIRE(r.exit_code == 0);
        json rep = json::parse(r.out);
        CHECK(rep["schema"] == 1);
        CHECK(rep["pass"] == true);
        CHECK(rep["model"] == model);
        for (const auto& c : rep["checks"]) CHECK(c["pass"] == true);
    }
    RunResult r = run("verify --model ball --param r=1 --param I=0.4 --seed 3");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["pass"] == true);
}

TEST_CASE("verify reports the flipped jacobiator expectations") {
    json particle = json::parse(run("verify --model particle").out);
    bool found = false;
    for (const auto& c : particle["checks"])
        if (c["name"] == "jacobiator_nonintegrable_nonzero") {
            found = true;
            CHECK(c["comparison"] == ">=");
            CHECK(double(c["max_residual"]) == Catch::Approx(0.5).margin(1e-9));
        }
    CHECK(found);
    json integ = json::parse(run("verify --model integrable").out);
    found = false;
    for (const auto& c : integ["checks"])
        if (c["name"] == "jacobiator_integrable_zero") {
            found = true;
            CHECK(double(c["max_residual"]) <= 1e-8);
        }
    CHECK(found);
}

TEST_CASE("unknown model or bad parameters exit with code 2") {
    CHECK(run("verify --model nosuch").exit_code == 2);
    CHECK(run("verify --model ball --param r=-1").exit_code == 2);
    CHECK(run("verify --model ball --param radius").exit_code == 2);
    CHECK(run("nosuchcommand").exit_code != 0);
}

TEST_CASE("projector dump at the reference point") {
    RunResult r = run("brackets --model particle --at \"0,1,0;0.5,0,0.5\" --dump-gamma");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["rank"] == 2);
    CHECK(double(rep["idempotence_residual"]) < 1e-12);
    CHECK(double(rep["gamma"][0][0]) == Catch::Approx(0.5).margin(1e-12));
    CHECK(double(rep["gamma"][0][2]) == Catch::Approx(0.5).margin(1e-12));
    CHECK(double(rep["gamma"][1][1]) == Catch::Approx(1.0).margin(1e-12));
    CHECK(double(rep["eden"][2][2]) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("bracket table matches the particle reference values") {
    RunResult r = run("brackets --model particle --at \"0,1,0;0.5,0,0.5\" --table");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    auto idx = [&](const std::string& label) {
        const auto& obs = rep["observables"];
        for (size_t i = 0; i < obs.size(); ++i)
            if (obs[i] == label) return static_cast<int>(i);
        FAIL("missing observable " + label);
        return -1;
    };
    int x = idx("x"), y = idx("y"), z = idx("z"), p1 = idx("pi1"), p2 = idx("pi2");
    for (const char* table : {"eden", "algebroid", "nonholonomic"}) {
        CHECK(double(rep[table][x][p2]) == Catch::Approx(1.0).margin(1e-7));
        CHECK(double(rep[table][y][p1]) == Catch::Approx(1.0).margin(1e-7));
        CHECK(double(rep[table][z][p2]) == Catch::Approx(1.0).margin(1e-7));  // y = 1 here
        CHECK(double(rep[table][x][p1]) == Catch::Approx(0.0).margin(1e-7));
    }
    CHECK(double(rep["max_discrepancy"]) < 1e-7);
}

TEST_CASE("bracket table refuses off-M points") {
    // p = dx violates p_z = y p_x at y = 1
    CHECK(run("brackets --model particle --at \"0,1,0;1,0,0\" --table").exit_code == 2);
}

TEST_CASE("simulate: zero momentum gives constant rows") {
    RunResult r = run("simulate --model particle --q0 0.2,0.4,-0.1 --p0 0,0,0 "
                      "--t-end 0.01 --dt 1e-3 --out /tmp/nonholo_cli_zero.csv");
    REQUIRE(r.exit_code == 0);
    json summary = json::parse(r.out);
    CHECK(summary["pass"] == true);
    CHECK(double(summary["energy_drift"]) == 0.0);
    std::ifstream csv("/tmp/nonholo_cli_zero.csv");
    std::string header, first, line;
    REQUIRE(std::getline(csv, header));
    CHECK(header.rfind("t,q_x,q_y,q_z,p_x,p_y,p_z,constraint_residual,energy", 0) == 0);
    REQUIRE(std::getline(csv, first));
    int rows = 1;
    while (std::getline(csv, line)) {
        ++rows;
        CHECK(line.substr(line.find(',')) == first.substr(first.find(',')));
    }
    CHECK(rows == 11);
}

TEST_CASE("simulate: ball keeps its first integrals over 10 seconds") {
    RunResult r = run("simulate --model ball --q0 0,0,1.2,0.5,-0.4 --p0 0.4,-0.2,0.3,0.6,-0.1 "
                      "--project-initial --t-end 10 --dt 1e-3 --out /tmp/nonholo_cli_ball.csv");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    json summary = json::parse(r.out);
    CHECK(summary["pass"] == true);
    CHECK(summary["status"] == "ok");
    CHECK(double(summary["energy_drift"]) <= 1e-6);
    CHECK(double(summary["constraint_drift"]) <= 1e-6);
    for (const auto& [name, drift] : summary["first_integral_drift"].items()) {
        INFO(name);
        CHECK(double(drift) <= 1e-6);
    }
}

TEST_CASE("simulate: off-M start without projection exits 2") {
    RunResult r = run("simulate --model particle --q0 0.2,0.4,-0.1 --p0 1,1,1 --t-end 0.01 --dt 1e-3");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("off M") != std::string::npos);
}

TEST_CASE("hj-check: builtin solutions pass, perturbed forms fail") {
    RunResult ok = run("hj-check --model particle --lambda closed-form");
    REQUIRE(ok.exit_code == 0);
    json rep = json::parse(ok.out);
    CHECK(rep["classical_pass"] == true);
    CHECK(double(rep["residuals"]["hj_classical"]) <= 1e-9);

    RunResult ball = run("hj-check --model ball --lambda constant");
    REQUIRE(ball.exit_code == 0);
    json brep = json::parse(ball.out);
    CHECK(brep["generalized_pass"] == true);
    CHECK(brep["classical_pass"] == false);

    RunResult bad = run("hj-check --model ball --lambda perturbed");
    CHECK(bad.exit_code == 1);
    json badrep = json::parse(bad.out);
    CHECK(badrep["pass"] == false);
    CHECK(double(badrep["worst_value"]) > 1e-3);
    CHECK(badrep["worst_point"].size() == 5);
}

TEST_CASE("hj-check: constant coefficients from a file and a custom grid") {
    {
        std::ofstream f("/tmp/nonholo_cli_lambda.txt");
        f << "1.0 1.0 1.0\n";
    }
    RunResult r = run("hj-check --model ball --lambda /tmp/nonholo_cli_lambda.txt "
                      "--grid 2:0.3:2.8:15");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["grid"] == "15 points");
    CHECK(rep["generalized_pass"] == true);
    CHECK(run("hj-check --model ball --lambda /tmp/nonholo_cli_lambda.txt --grid bad").exit_code == 2);
    CHECK(run("hj-check --model ball --lambda /tmp/nonholo_cli_lambda.txt --grid 2:0:3.2:5").exit_code == 2);
}

TEST_CASE("parameters can come from a config file") {
    {
        std::ofstream f("/tmp/nonholo_cli_config.txt");
        f << "# rolling ball setup\n" << "m = 2.0\n" << "r = 0.5\n";
    }
    RunResult r = run("verify --model ball --config /tmp/nonholo_cli_config.txt --seed 5");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(double(rep["params"]["m"]) == 2.0);
    CHECK(double(rep["params"]["r"]) == 0.5);
    CHECK(rep["pass"] == true);
}

TEST_CASE("reports are deterministic for a fixed seed") {
    RunResult a = run("verify --model particle --seed 11 --out /tmp/nonholo_cli_a.json");
    RunResult b = run("verify --model particle --seed 11 --out /tmp/nonholo_cli_b.json");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp("/tmp/nonholo_cli_a.json") == slurp("/tmp/nonholo_cli_b.json"));

    // env fallback produces the same report as the explicit flag
    std::string cmd = std::string("NONHOLO_SEED=11 ") + NONHOLO_CLI_PATH +
                      " verify --model particle --out /tmp/nonholo_cli_c.json 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp("/tmp/nonholo_cli_a.json") == slurp("/tmp/nonholo_cli_c.json"));
}
