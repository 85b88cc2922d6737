#include "mesolead/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace mesolead;
namespace fs = std::filesystem;

namespace {

fs::path scratchDir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mesolead_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int runCli(const std::string& args) {
    const int status = std::system((std::string(MESOLEAD_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("scenario names round-trip") {
    for (auto k : {ScenarioKind::ThermalizationSweep, ScenarioKind::EntropyRates, ScenarioKind::BudgetSingle,
                   ScenarioKind::BudgetMulti, ScenarioKind::OracleCheck}) {
        CHECK(parseScenarioKind(scenarioName(k)) == k);
        CHECK_NOTHROW(validate(defaultConfig(k)));
    }
    CHECK_THROWS_AS(parseScenarioKind("nope"), ConfigError);
}

TEST_CASE("defaults") {
    const auto sweep = defaultConfig(ScenarioKind::ThermalizationSweep);
    CHECK(sweep.sweep.sites == std::vector<int>{1, 2, 3, 4});
    CHECK(sweep.sweep.modes == std::vector<int>{16, 32, 64, 128, 256});
    CHECK(sweep.sweep.temperatures == std::vector<double>{0.5, 1.0, 5.0});
    const auto multi = defaultConfig(ScenarioKind::BudgetMulti);
    REQUIRE(multi.leads.size() == 2);
    CHECK(multi.leads[0].temperature == 0.5);
    CHECK(multi.leads[1].temperature == 1.0);
    CHECK(multi.system.attachment == std::vector<int>{0, 0});
    const auto single = defaultConfig(ScenarioKind::BudgetSingle);
    CHECK(single.leads[0].modes == 100);
    CHECK(single.leads[0].half_bandwidth == 10.0);
    CHECK(single.leads[0].coupling == 1.0);
    CHECK(single.initial_occupations == std::vector<double>{0.5});
    CHECK(single.dt == 0.01);
}

TEST_CASE("JSON overrides") {
    const auto c = configFromJson(ScenarioKind::BudgetMulti, R"({
        "scenario": "budget-multi",
        "system": {"sites": 3, "onsite": [0.1, 0.2, 0.3], "hopping": 0.5, "attachment": [1, 3]},
        "leads": [{"modes": 10, "temperature": 0.2}, {"modes": 12, "chemical_potential": 0.4}],
        "dt": 0.005, "t_max": 4, "initial_occupations": [1, 0, 0.5], "threads": 2
    })");
    CHECK(c.system.sites == 3);
    CHECK(c.system.onsite[2] == 0.3);
    CHECK(c.system.attachment == std::vector<int>{0, 2});
    CHECK(c.leads[0].modes == 10);
    CHECK(c.leads[0].temperature == 0.2);
    CHECK(c.leads[0].half_bandwidth == 10.0);
    CHECK(c.leads[1].chemical_potential == 0.4);
    CHECK(c.dt == 0.005);
    CHECK(c.threads == 2);
    CHECK_NOTHROW(validate(c));

    // a scalar onsite energy fills every site and sites default to half filling
    const auto d = configFromJson(ScenarioKind::BudgetSingle, R"({"system": {"sites": 2, "onsite": 0.7}})");
    CHECK(d.system.onsite == std::vector<double>{0.7, 0.7});
    CHECK(d.initial_occupations == std::vector<double>{0.5, 0.5});
    CHECK(d.system.attachment == std::vector<int>{0});

    // the resolved document parses back to the same configuration
    const auto again = configFromJson(ScenarioKind::BudgetMulti, configToJson(c));
    CHECK(configToJson(again) == configToJson(c));
}

TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(configFromJson(ScenarioKind::BudgetSingle, "{not json"), ConfigError);
    CHECK_THROWS_AS(configFromJson(ScenarioKind::BudgetSingle, R"({"dtt": 0.1})"), ConfigError);
    CHECK_THROWS_AS(configFromJson(ScenarioKind::BudgetSingle, R"({"leads": [{"mode": 3}]})"), ConfigError);
    CHECK_THROWS_AS(configFromJson(ScenarioKind::BudgetSingle, R"({"scenario": "budget-multi"})"), ConfigError);
    CHECK_THROWS_AS(configFromJson(ScenarioKind::BudgetSingle, R"({"dt": "small"})"), ConfigError);

    auto bad = [](const std::string& text, ScenarioKind k = ScenarioKind::BudgetSingle) {
        CHECK_THROWS_AS(validate(configFromJson(k, text)), ConfigError);
    };
    bad(R"({"dt": 0})");
    bad(R"({"dt": 0.1, "t_max": 0.05})");
    bad(R"({"leads": [{"temperature": 0}]})");
    bad(R"({"leads": [{"coupling": -1}]})");
    bad(R"({"leads": [{"modes": 0}]})");
    bad(R"({"system": {"attachment": [0]}})");
    bad(R"({"system": {"attachment": [2]}})");
    bad(R"({"system": {"sites": 2, "onsite": [1]}})");
    bad(R"({"initial_occupations": [1.5]})");
    bad(R"({"leads": [{}, {}]})");
    bad(R"({"leads": [{}]})", ScenarioKind::BudgetMulti);
    bad(R"({"sweep": {"L": []}})", ScenarioKind::ThermalizationSweep);
    bad(R"({"sweep": {"T": [-1]}})", ScenarioKind::ThermalizationSweep);
    bad(R"({"threads": 0})");
}

TEST_CASE("CSV output") {
    Table t{{"a", "b"}, {{1.0, 0.1}, {2.0, 1.0 / 3.0}}};
    std::ostringstream os;
    writeCsv(os, t);
    CHECK(os.str() == "a,b\n1,0.10000000000000001\n2,0.33333333333333331\n");

    t.rows.push_back({3.0, NAN});
    std::ostringstream none;
    CHECK_THROWS_AS(writeCsv(none, t), NumericalError);
    CHECK(none.str().empty());
    t.rows.back() = {INFINITY, 1.0};
    CHECK_THROWS_AS(writeCsv(none, t), NumericalError);

    const fs::path dir = scratchDir("csv");
    CHECK_THROWS_AS(writeCsv(dir / "x.csv", t), NumericalError);
    CHECK_FALSE(fs::exists(dir / "x.csv"));
}

TEST_CASE("budget column schema") {
    const auto one = thermoColumns(1);
    CHECK(one.size() == 1 + 8 + 11);
    CHECK(one[1] == "I_E.1");
    CHECK(one[8] == "dF_L.1");
    CHECK(one.back() == "budget_residual");
    const auto two = thermoColumns(2);
    CHECK(two.size() == 1 + 16 + 11);
    CHECK(two[9] == "I_E.2");
    CHECK(std::find(two.begin(), two.end(), "mutual_or_total_corr") != two.end());
}

TEST_CASE("budget run is deterministic and the row matches the schema") {
    auto c = configFromJson(ScenarioKind::BudgetMulti,
                            R"({"leads": [{"modes": 8, "temperature": 0.5}, {"modes": 8}], "t_max": 1, "record_interval": 0.1})");
    const auto recs = runBudget(c);
    CHECK(recs.size() == 11);
    const auto table = budgetTable(recs);
    CHECK(table.rows.front().size() == table.columns.size());
    std::ostringstream a, b;
    writeCsv(a, table);
    writeCsv(b, budgetTable(runBudget(c)));
    CHECK(a.str() == b.str());
}

TEST_CASE("entropy-rates table carries T and L") {
    auto c = configFromJson(ScenarioKind::EntropyRates,
                            R"({"sweep": {"L": [4, 2], "T": [1.0, 0.5]}, "t_max": 0.2, "record_interval": 0.1})");
    const auto cells = runEntropyRates(c);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].temperature == 0.5);
    CHECK(cells[0].modes == 2);
    CHECK(cells[3].modes == 4);
    const auto t = ratesTable(cells);
    CHECK(t.columns[0] == "T");
    CHECK(t.columns[1] == "L");
    CHECK(t.rows.size() == 4 * 3);
}

TEST_CASE("sweep skips failing cells and keeps the rest") {
    auto c = configFromJson(ScenarioKind::ThermalizationSweep,
                            R"({"system": {"hopping": 0}, "sweep": {"N": [2, 1], "L": [8], "T": [1, 0.5]}, "threads": 2})");
    const auto r = runThermalizationSweep(c);
    CHECK(r.failures.size() == 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].sites == 1);
    CHECK(r.rows[0].temperature == 0.5);
    CHECK(r.rows[0].infidelity >= 0.0);
    CHECK(r.rows[0].rel_entropy >= 0.0);
    CHECK(sweepTable(r).columns == std::vector<std::string>{"N", "L", "T", "infidelity", "rel_entropy"});
}

TEST_CASE("command-line exit codes and outputs") {
    const fs::path dir = scratchDir("cli");
    {
        std::ofstream(dir / "bad.json") << R"({"leads": [{"temperature": -1}]})";
        std::ofstream(dir / "small.json") << R"({"leads": [{"modes": 6}], "t_max": 0.5})";
        std::ofstream(dir / "broken.json") << R"({"system": {"hopping": 0, "sites": 2}, "initial_occupations": [0.5, 0.5]})";
        std::ofstream(dir / "sweep.json") << R"({"system": {"hopping": 0}, "sweep": {"N": [1, 2], "L": [4], "T": [1]}})";
    }
    const std::string out = " --out " + (dir / "out").string();
    CHECK(runCli("budget-single --config " + (dir / "bad.json").string() + out) == 1);
    CHECK(runCli("budget-single --config " + (dir / "missing.json").string() + out) == 1);
    CHECK(runCli("no-such-scenario") == 1);
    CHECK(runCli("budget-single --dt -1" + out) == 1);
    CHECK(runCli("budget-single --config " + (dir / "broken.json").string() + out) == 2);

    CHECK(runCli("budget-single --config " + (dir / "small.json").string() + out) == 0);
    const std::string csv = slurp(dir / "out" / "budget-single.csv");
    CHECK(csv.rfind("t,I_E.1,", 0) == 0);
    const std::string manifest = slurp(dir / "out" / "budget-single_manifest.txt");
    CHECK(manifest.find("\"modes\": 6") != std::string::npos);
    CHECK(manifest.find("budget-single.csv") != std::string::npos);

    CHECK(runCli("thermalization-sweep --config " + (dir / "sweep.json").string() + out) == 2);
    const std::string sweep = slurp(dir / "out" / "thermalization-sweep.csv");
    CHECK(sweep.rfind("N,L,T,infidelity,rel_entropy\n1,4,1,", 0) == 0);
    CHECK(slurp(dir / "out" / "thermalization-sweep_manifest.txt").find("skipped N=2") != std::string::npos);
}
