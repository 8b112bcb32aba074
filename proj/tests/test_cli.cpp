#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "semhier/cli.hpp"
#include "semhier/corpus.hpp"

using namespace semhier;
namespace fs = std::filesystem;
using semhier::testing::read_text;
using semhier::testing::TempDir;
using semhier::testing::write_text;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Inputs on disk: a small clustered corpus and its lexicon.
struct Inputs {
    TempDir dir;
    std::string corpus;
    std::string lexicon;

    explicit Inputs(std::size_t images = 120) {
        corpus = (dir / "corpus.json").string();
        lexicon = (dir / "lexicon.json").string();
        save_corpus(semhier::testing::clustered_corpus({.images = images, .seed = 2}), corpus);
        write_text(lexicon, semhier::testing::clustered_lexicon_json().dump());
    }
    std::string out(const std::string& name) const { return (dir / name).string(); }
};

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::vector<std::string> column(const std::string& csv, std::size_t col) {
    std::vector<std::string> out;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t k = 0; k <= col; ++k) std::getline(ls, cell, ',');
        out.push_back(cell);
    }
    return out;
}

int run_tool(const std::string& args) {
    const int status = std::system((std::string(SEMHIER_TOOL_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("similarity writes every matrix") {
    Inputs in;
    const auto out = in.out("sim");
    const auto r = run_cli({"similarity", "--corpus", in.corpus, "--lexicon", in.lexicon, "--out", out});
    REQUIRE(r.code == cli::kOk);
    const std::size_t n = semhier::testing::clustered_concepts().size();
    for (const auto* name : {"visual", "conceptual", "contextual", "fused", "breakdown", "senses"}) {
        CAPTURE(name);
        CHECK(line_count(read_text(fs::path(out) / (std::string(name) + ".csv"))) == n * n + 1);
    }
    CHECK(fs::exists(fs::path(out) / "config.json"));
}

TEST_CASE("visual-only weights make fused equal to visual") {
    Inputs in;
    const auto out = in.out("proj");
    const auto r = run_cli(
        {"similarity", "--corpus", in.corpus, "--lexicon", in.lexicon, "--out", out, "--weights", "1,0,0"});
    REQUIRE(r.code == cli::kOk);
    CHECK(read_text(fs::path(out) / "fused.csv") == read_text(fs::path(out) / "visual.csv"));
    CHECK(column(read_text(fs::path(out) / "breakdown.csv"), 8) ==
          column(read_text(fs::path(out) / "breakdown.csv"), 5));
}

TEST_CASE("reruns are byte-identical") {
    Inputs in;
    for (const auto* dir : {"a", "b"}) {
        const auto r = run_cli({"build", "--corpus", in.corpus, "--lexicon", in.lexicon, "--out", in.out(dir)});
        REQUIRE(r.code == cli::kOk);
    }
    for (const auto* file : {"hierarchy.json", "hierarchy.dot", "merges.log"}) {
        CAPTURE(file);
        const auto a = read_text(fs::path(in.out("a")) / file);
        CHECK_FALSE(a.empty());
        CHECK(a == read_text(fs::path(in.out("b")) / file));
    }
}

TEST_CASE("two concepts build a three-node hierarchy") {
    TempDir dir;
    const auto full = semhier::testing::clustered_corpus({.images = 120, .seed = 4});
    std::vector<ImageRecord> records;
    for (const auto& img : full.images()) {
        const auto& l = img.labels;
        const bool dog = std::find(l.begin(), l.end(), "dog") != l.end();
        const bool car = std::find(l.begin(), l.end(), "car") != l.end();
        if (dog != car) records.push_back({img.id, {dog ? "dog" : "car"}, img.features});
    }
    save_corpus(Corpus::from_records(records, full.feature_dim()), dir / "c.json");
    write_text(dir / "l.json", semhier::testing::clustered_lexicon_json().dump());
    const auto r = run_cli({"build", "--corpus", (dir / "c.json").string(), "--lexicon", (dir / "l.json").string(),
                            "--out", (dir / "o").string()});
    REQUIRE(r.code == cli::kOk);
    const auto dot = read_text(dir / "o" / "hierarchy.dot");
    std::size_t shapes = 0;
    for (auto p = dot.find("shape="); p != std::string::npos; p = dot.find("shape=", p + 1)) ++shapes;
    CHECK(shapes == 3);
    CHECK(dot.find("shape=diamond") != std::string::npos);
}

TEST_CASE("evaluate against a built hierarchy") {
    Inputs in(240);
    REQUIRE(run_cli({"build", "--corpus", in.corpus, "--lexicon", in.lexicon, "--out", in.out("b")}).code == 0);
    const auto out = in.out("e");
    const auto r = run_cli({"evaluate", "--corpus", in.corpus, "--lexicon", in.lexicon, "--hierarchy",
                            in.out("b") + "/hierarchy.json", "--out", out, "--seed", "3"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("delta ") != std::string::npos);
    const auto report = read_text(fs::path(out) / "report.csv");
    CHECK(report.rfind("concept,ap_flat,ap_hier,delta\n", 0) == 0);
    CHECK(report.find("\nmean,") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "pr" / "dog_flat.csv"));
    CHECK(fs::exists(fs::path(out) / "pr" / "dog_hier.csv"));

    const auto cfg = nlohmann::json::parse(read_text(fs::path(out) / "config.json"));
    CHECK(cfg["seed"] == 3);
    CHECK(cfg["folds"] == 5);
    CHECK(cfg["weights"] == nlohmann::json::array({0.4, 0.3, 0.3}));
}

TEST_CASE("all runs the whole pipeline") {
    Inputs in(240);
    const auto out = in.out("all");
    const auto r = run_cli({"all", "--corpus", in.corpus, "--lexicon", in.lexicon, "--out", out});
    REQUIRE(r.code == cli::kOk);
    for (const auto* file : {"fused.csv", "hierarchy.json", "hierarchy.dot", "report.csv", "config.json"}) {
        CAPTURE(file);
        CHECK(fs::exists(fs::path(out) / file));
    }
}

TEST_CASE("usage errors exit with 2") {
    Inputs in;
    const std::vector<std::string> base = {"--corpus", in.corpus, "--lexicon", in.lexicon, "--out", in.out("u")};
    auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), base.begin(), base.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return run_cli(head).code;
    };
    CHECK(with({"similarity"}, {"--weights", "0.5,0.5,0.5"}) == cli::kUsage);
    CHECK(with({"similarity"}, {"--weights", "1,0"}) == cli::kUsage);
    CHECK(with({"similarity"}, {"--weights", "a,b,c"}) == cli::kUsage);
    CHECK(with({"similarity"}, {"--sigma", "-1"}) == cli::kUsage);
    CHECK(with({"similarity"}, {"--pmi", "fancy"}) == cli::kUsage);
    CHECK(with({"similarity"}, {"--bogus"}) == cli::kUsage);
    CHECK(with({"all"}, {"--split", "1.5"}) == cli::kUsage);
    CHECK(with({"evaluate"}, {}) == cli::kUsage);  // --hierarchy missing
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"similarity", "--lexicon", in.lexicon}).code == cli::kUsage);
}

TEST_CASE("runtime errors exit with 1") {
    Inputs in;
    CHECK(run_cli({"evaluate", "--corpus", in.corpus, "--lexicon", in.lexicon, "--hierarchy", in.out("none.json"),
                   "--out", in.out("x")})
              .code == cli::kRuntime);
    CHECK(run_cli({"similarity", "--corpus", in.out("missing.json"), "--lexicon", in.lexicon, "--out", in.out("y")})
              .code == cli::kRuntime);
}

TEST_CASE("help exits with 0") {
    const auto r = run_cli({"--help"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("similarity") != std::string::npos);
    CHECK(run_cli({"build", "--help"}).code == cli::kOk);
}

TEST_CASE("weight and sigma parsing") {
    const auto w = cli::parse_weights("0.2,0.3,0.5");
    CHECK(w.visual == 0.2);
    CHECK(w.contextual == 0.5);
    CHECK_FALSE(cli::parse_sigma("median").has_value());
    CHECK(cli::parse_sigma("2.5").value() == 2.5);
    CHECK_THROWS_AS(cli::parse_sigma("0"), cli::UsageError);
    CHECK_THROWS_AS(cli::parse_weights("0.2,0.3,0.5x"), cli::UsageError);
}

TEST_CASE("installed tool exit codes") {
    CHECK(run_tool("--help") == 0);
    CHECK(run_tool("similarity --weights 2,0,0 --corpus x --lexicon y") == 2);
    CHECK(run_tool("similarity --corpus /nonexistent.json --lexicon /nonexistent.json --out /tmp/semhier-x") == 1);
}
