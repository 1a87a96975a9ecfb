#ifndef FSPEC_VERIFY_HPP
#define FSPEC_VERIFY_HPP

#include "fspec/config.hpp"
#include "fspec/lattice.hpp"
#include "fspec/spectrum.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fspec {

enum class CheckStatus { pass, fail, skipped, excluded };
std::string_view to_string(CheckStatus s) noexcept;

struct CheckRecord {
    std::string id;
    std::string measure;
    std::string fingerprint;
    /// Full parameter tuple, in a fixed order, for replaying the check.
    std::vector<std::pair<std::string, std::string>> params;
    std::string quantity;
    double measured = std::numeric_limits<double>::quiet_NaN();
    std::string comparison;  // "<", "<=" or ">="
    double threshold = 0.0;
    CheckStatus status = CheckStatus::skipped;
    std::string note;
    /// Wall time; kept out of report files so that reports are reproducible.
    double runtime_seconds = 0.0;
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckRecord> checks;

    std::size_t count(CheckStatus s) const noexcept;
    bool ok() const noexcept { return count(CheckStatus::fail) == 0; }
};

struct VerifyOptions {
    std::vector<double> theta_grid = default_theta_grid();
    double dim_tolerance = 0.05;   // rescaling agreement
    double bound_slack = 0.1;      // upper bound and l^p corollary
    double ratio_band = 2.0;       // norm equivalence
    double drift_limit = 0.2;      // coefficient theorem
    double gap_limit = 0.05;       // shape
    double min_margin = 0.125;     // coefficient theorem hypothesis
    double lp_margin = 0.25;       // norm equivalence hypothesis
    std::vector<std::pair<double, double>> energy_pairs = {{1.0, 1.0}, {0.5, 0.5}};  // (s, theta)
    int drift_shell_low = 10;
    int drift_shell_high = 12;
    std::vector<double> lp_exponents = {2.0, 4.0};
    int lp_shell_first = 6;
    int lp_shell_last = 12;
    std::vector<double> corollary_exponents = {2.0, 4.0};
    std::pair<double, double> alpha_pair = {1.0, 0.5};
    std::vector<double> rescale_thetas = {0.0, 0.5, 1.0};
    /// Overrides the default shell cap J (14 for d = 1, 10 for d = 2) when set.
    std::optional<int> max_shell;
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 1;
    std::uint64_t seed = 20240601;
};

VerificationReport check_coeff_theorem(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_lp_equivalence(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_upper_bound(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_lp_corollary(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_rescaling(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_shape(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);
VerificationReport check_convolution_law(const std::vector<ZooMember>& zoo, const VerifyOptions& opts);

/// Lebesgue measure on [0, 1] seen on Z (every nonzero coefficient vanishes),
/// next to its copy normalized into [1/4, 3/4], and optionally the original on
/// alt_alpha Z.
struct DeltaDemoRow {
    std::string label;
    double alpha = 1.0;
    std::optional<double> margin;
    double max_coefficient = 0.0;  // max |mu^(alpha n)| over n = +-1..+-100
    std::vector<double> thetas;
    std::vector<std::optional<double>> dims;
    std::string flag;  // "degenerate" or "ok"
};

struct DeltaDemo {
    std::vector<DeltaDemoRow> rows;
    VerificationReport report;
};

DeltaDemo demo_delta_necessity(const VerifyOptions& opts, std::optional<double> alt_alpha = std::nullopt);

std::vector<std::string> suite_names();  // every suite accepted by run_suite, "all" last

/// Runs one suite by name (or every suite for "all"); throws ContractError for
/// an unknown name.
std::vector<VerificationReport> run_suite(std::string_view name, const std::vector<ZooMember>& zoo,
                                          const VerifyOptions& opts);

/// Structured report (JSON) and flat CSV summary, both byte-reproducible.
std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);
std::string delta_demo_to_csv(const DeltaDemo& demo);

} // namespace fspec

#endif
