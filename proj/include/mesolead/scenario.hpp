// scenario.hpp: scenario configuration, drivers and CSV output for the command-line tool

#pragma once

#include "mesolead/lattice.hpp"
#include "mesolead/thermo.hpp"
#include "mesolead/validation.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mesolead {

enum class ScenarioKind { ThermalizationSweep, EntropyRates, BudgetSingle, BudgetMulti, OracleCheck };

std::string scenarioName(ScenarioKind kind);
ScenarioKind parseScenarioKind(const std::string& name);

// Invalid or inconsistent configuration (CLI exit status 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SweepAxes {
    std::vector<int> sites;           // N
    std::vector<int> modes;           // L
    std::vector<double> temperatures; // T
};

struct ScenarioConfig {
    ScenarioKind kind{ScenarioKind::BudgetSingle};
    SystemSpec system;
    std::vector<LeadSpec> leads;
    SweepAxes sweep;
    double dt{0.01};
    double t_max{20.0};
    double record_interval{0.1};
    std::vector<double> initial_occupations;
    std::string output_dir{"."};
    int threads{1};
};

ScenarioConfig defaultConfig(ScenarioKind kind);

// Overlays a JSON document on the defaults of `kind`. Lead attachment sites are 1-based
// in the document. Unknown keys are rejected. Throws ConfigError.
ScenarioConfig configFromJson(ScenarioKind kind, const std::string& text);
ScenarioConfig loadConfig(ScenarioKind kind, const std::filesystem::path& path);

// Throws ConfigError.
void validate(const ScenarioConfig& config);

// Resolved parameters as pretty-printed JSON.
std::string configToJson(const ScenarioConfig& config);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// 17 significant digits; throws NumericalError before writing anything if a cell is NaN or Inf.
void writeCsv(std::ostream& os, const Table& table);
void writeCsv(const std::filesystem::path& path, const Table& table);

// Trajectory from the uncorrelated initial state with a record every `record_interval`
// (rounded to a whole number of steps) and at t_max.
std::vector<ThermoRecord> runThermoTrajectory(const ExtendedModel& model, const std::vector<double>& init, double dt,
                                              double t_max, double record_interval,
                                              Quadrature rule = Quadrature::Simpson);

std::vector<std::string> thermoColumns(std::size_t leads);
std::vector<double> thermoRow(const ThermoRecord& record);

struct SweepRow {
    int sites{0};
    int modes{0};
    double temperature{0.0};
    double infidelity{0.0};
    double rel_entropy{0.0};  // D(rho_ss || rho_beta)
};

struct SweepResult {
    std::vector<SweepRow> rows;          // sorted by (N, L, T)
    std::vector<std::string> failures;   // one message per skipped cell
};

SweepRow thermalizationCell(const ScenarioConfig& config, int sites, int modes, double temperature);
SweepResult runThermalizationSweep(const ScenarioConfig& config);
Table sweepTable(const SweepResult& result);

struct RatesCell {
    double temperature{0.0};
    int modes{0};
    std::vector<ThermoRecord> records;
};

RatesCell entropyRatesCell(const ScenarioConfig& config, double temperature, int modes);
std::vector<RatesCell> runEntropyRates(const ScenarioConfig& config);
Table ratesTable(const std::vector<RatesCell>& cells);

ExtendedModel modelFor(const ScenarioConfig& config);
std::vector<ThermoRecord> runBudget(const ScenarioConfig& config);
Table budgetTable(const std::vector<ThermoRecord>& records);

std::vector<CheckResult> runOracleCheck(const ScenarioConfig& config);
void printChecks(std::ostream& os, const std::vector<CheckResult>& checks);

} // namespace mesolead
