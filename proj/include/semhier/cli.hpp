#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semhier/classify.hpp"
#include "semhier/conceptual.hpp"
#include "semhier/contextual.hpp"
#include "semhier/error.hpp"
#include "semhier/fusion.hpp"

namespace semhier::cli {

enum ExitCode : int { kOk = 0, kRuntime = 1, kUsage = 2 };

// Bad flag values that CLI11 cannot check on its own (weights, split, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path lexicon;
    std::filesystem::path hierarchy;
    std::filesystem::path out = "out";
    Weights weights;
    PmiMode pmi = PmiMode::standard;
    GlossMatch gloss = GlossMatch::aligned;
    std::optional<double> sigma;  // unset: median heuristic
    double svm_c = 10.0;
    double tol = 1e-3;
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    double split = 0.5;
    LeafScore leaf_score = LeafScore::min;
    double threshold = 0.0;
    bool normalize_features = false;

    nlohmann::json to_json() const;
};

// "a,b,c" -> validated weights. Throws UsageError.
Weights parse_weights(const std::string& text);
// "median" or a positive number. Throws UsageError.
std::optional<double> parse_sigma(const std::string& text);

// Runs one subcommand; `args` excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semhier::cli
