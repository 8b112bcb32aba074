#include "semhier/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "semhier/corpus.hpp"
#include "semhier/hierarchy.hpp"
#include "semhier/lexicon.hpp"
#include "semhier/visual.hpp"

namespace semhier::cli {

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string matrix_csv(const SimilarityMatrix& m, const SymMatrix& values) {
    std::ostringstream os;
    os << "concept_i,concept_j,value\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            os << m.concepts[i] << ',' << m.concepts[j] << ',' << num(values(i, j)) << '\n';
        }
    }
    return os.str();
}

std::string breakdown_csv(const SimilarityMatrix& m) {
    std::ostringstream os;
    os << "concept_i,concept_j,visual_raw,conceptual_raw,contextual_raw,visual,conceptual,contextual,fused\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            os << m.concepts[i] << ',' << m.concepts[j];
            for (const auto& r : m.raw) os << ',' << num(r(i, j));
            for (const auto& r : m.normalized) os << ',' << num(r(i, j));
            os << ',' << num(m.fused(i, j)) << '\n';
        }
    }
    return os.str();
}

std::string senses_csv(const SimilarityMatrix& m) {
    std::ostringstream os;
    os << "concept_i,concept_j,score,sense_i,sense_j\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            const auto& sp = m.sense_pair(i, j);
            os << m.concepts[i] << ',' << m.concepts[j] << ',' << num(sp.score) << ',' << sp.sense_a << ','
               << sp.sense_b << '\n';
        }
    }
    return os.str();
}

std::string merges_log(const Hierarchy& h) {
    std::ostringstream os;
    for (const auto& m : h.merges()) {
        os << "iteration " << m.iteration << ' ' << rule_name(m.rule) << " phi=" << num(m.phi) << " members=";
        for (std::size_t k = 0; k < m.members.size(); ++k) os << (k ? "," : "") << m.members[k];
        os << " created=";
        for (std::size_t k = 0; k < m.created.size(); ++k) os << (k ? "," : "") << m.created[k];
        os << '\n';
    }
    return os.str();
}

std::string pr_csv(const std::vector<PrPoint>& pr) {
    std::ostringstream os;
    os << "recall,precision\n";
    for (const auto& p : pr) os << num(p.recall) << ',' << num(p.precision) << '\n';
    return os.str();
}

std::string report_csv(const Evaluation& e) {
    std::ostringstream os;
    os << "concept,ap_flat,ap_hier,delta\n";
    for (std::size_t k = 0; k < e.flat.concepts.size(); ++k) {
        const auto& f = e.flat.concepts[k];
        const auto& h = e.hierarchical.concepts[k];
        os << f.label << ',' << num(f.ap) << ',' << num(h.ap) << ',' << num(h.ap - f.ap) << '\n';
    }
    os << "mean," << num(e.flat.mean_ap) << ',' << num(e.hierarchical.mean_ap) << ',' << num(e.delta) << '\n';
    return os.str();
}

// Everything the subcommands share.
class Pipeline {
public:
    Pipeline(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

    Corpus load_corpus_input() const {
        if (cfg_.corpus.empty()) throw UsageError("--corpus is required");
        auto c = load_corpus(cfg_.corpus);
        return cfg_.normalize_features ? c.l1_normalized() : c;
    }

    Lexicon load_lexicon_input() const {
        if (cfg_.lexicon.empty()) throw UsageError("--lexicon is required");
        return load_lexicon(cfg_.lexicon);
    }

    std::vector<ConceptProfile> profiles(const Corpus& corpus, const Lexicon& lexicon) const {
        VisualOptions v;
        v.sigma = cfg_.sigma;
        v.svm = svm_options();
        v.seed = cfg_.seed;
        const auto centroids = concept_centroids(corpus, v);
        return leaf_profiles(corpus, lexicon, centroids);
    }

    SimilarityOptions similarity_options() const { return {cfg_.weights, cfg_.pmi, cfg_.gloss}; }

    void similarity(const Corpus& corpus, const Lexicon& lexicon, const std::vector<ConceptProfile>& leaves) const {
        if (weighted_pmi_recommended(compute_context_stats(corpus)) && cfg_.pmi == PmiMode::standard) {
            out_ << "note: concept frequencies vary by more than 10x; --pmi weighted is recommended\n";
        }
        const auto m = compute_similarity(leaves, corpus.size(), lexicon, similarity_options());
        static constexpr const char* names[] = {"visual", "conceptual", "contextual"};
        for (std::size_t c = 0; c < kChannels; ++c) {
            write_file(cfg_.out / (std::string(names[c]) + ".csv"), matrix_csv(m, m.normalized[c]));
        }
        write_file(cfg_.out / "fused.csv", matrix_csv(m, m.fused));
        write_file(cfg_.out / "breakdown.csv", breakdown_csv(m));
        write_file(cfg_.out / "senses.csv", senses_csv(m));
        out_ << "wrote similarity matrices for " << m.size() << " concepts to " << cfg_.out.string() << '\n';
    }

    Hierarchy build(const Corpus& corpus, const Lexicon& lexicon, const std::vector<ConceptProfile>& leaves) const {
        BuildConfig b;
        b.similarity = similarity_options();
        auto h = build_hierarchy(leaves, corpus.size(), lexicon, b);
        write_file(cfg_.out / "hierarchy.json", h.to_json().dump(2) + "\n");
        write_file(cfg_.out / "hierarchy.dot", h.to_dot());
        write_file(cfg_.out / "merges.log", merges_log(h));
        out_ << "hierarchy: " << h.nodes().size() << " nodes, " << h.merges().size() << " merges, root '"
             << h.node(h.root()).name << "'\n";
        return h;
    }

    void evaluate(const Corpus& train, const Corpus& test, const Hierarchy& h) const {
        ClassifyOptions o;
        o.folds = cfg_.folds;
        o.seed = cfg_.seed;
        o.svm = svm_options();
        o.sigma = cfg_.sigma;
        o.threshold = cfg_.threshold;
        o.leaf_score = cfg_.leaf_score;

        const auto flat = train_flat(train, o);
        const auto hier = train_hierarchical(train, h, o);
        auto e = evaluate_models(flat, hier, test);

        write_file(cfg_.out / "report.csv", report_csv(e));
        for (std::size_t k = 0; k < e.flat.concepts.size(); ++k) {
            const auto& label = e.flat.concepts[k].label;
            write_file(cfg_.out / "pr" / (label + "_flat.csv"), pr_csv(e.flat.concepts[k].pr));
            write_file(cfg_.out / "pr" / (label + "_hier.csv"), pr_csv(e.hierarchical.concepts[k].pr));
        }
        out_ << "mean AP flat " << num(e.flat.mean_ap) << " hierarchical " << num(e.hierarchical.mean_ap) << '\n';
        out_ << "delta " << num(e.delta) << '\n';
    }

    void echo_config() const { write_file(cfg_.out / "config.json", cfg_.to_json().dump(2) + "\n"); }

private:
    SvmOptions svm_options() const {
        SvmOptions s;
        s.c = cfg_.svm_c;
        s.tol = cfg_.tol;
        return s;
    }

    Evaluation evaluate_models(const std::map<std::string, SvmModel>& flat, const HierarchicalClassifier& hier,
                               const Corpus& test) const {
        auto e = semhier::evaluate(flat, hier, test);
        e.flat.config = e.hierarchical.config = cfg_.to_json();
        return e;
    }

    const RunConfig& cfg_;
    std::ostream& out_;
};

struct RawFlags {
    std::string weights = "0.4,0.3,0.3";
    std::string pmi = "standard";
    std::string gloss = "aligned";
    std::string sigma = "median";
    std::string leaf_score = "min";
};

void add_common(CLI::App* app, RunConfig& cfg, RawFlags& raw, bool needs_hierarchy) {
    app->add_option("--corpus", cfg.corpus, "Annotated corpus (.json or .csv)");
    app->add_option("--lexicon", cfg.lexicon, "Lexicon JSON");
    app->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    app->add_option("--weights", raw.weights, "Fusion weights visual,conceptual,contextual")->capture_default_str();
    app->add_option("--pmi", raw.pmi, "PMI variant")->check(CLI::IsMember({"standard", "weighted"}))
        ->capture_default_str();
    app->add_option("--gloss-match", raw.gloss, "Gloss slot matching")
        ->check(CLI::IsMember({"aligned", "all-pairs"}))
        ->capture_default_str();
    app->add_option("--sigma", raw.sigma, "RBF width: median or a positive value")->capture_default_str();
    app->add_option("--svm-c", cfg.svm_c, "SVM soft-margin C")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--tol", cfg.tol, "SMO KKT tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app->add_flag("--normalize-features", cfg.normalize_features, "L1-normalize feature histograms");
    if (needs_hierarchy) {
        app->add_option("--hierarchy", cfg.hierarchy, "Hierarchy JSON from `build`")->required();
    }
}

void add_classify(CLI::App* app, RunConfig& cfg, RawFlags& raw) {
    app->add_option("--folds", cfg.folds, "Cross-validation folds")->check(CLI::Range(1, 1000))->capture_default_str();
    app->add_option("--split", cfg.split, "Training fraction")->capture_default_str();
    app->add_option("--leaf-score", raw.leaf_score, "Leaf score along the path")
        ->check(CLI::IsMember({"min", "product"}))
        ->capture_default_str();
    app->add_option("--threshold", cfg.threshold, "Margin needed to enter a child")->capture_default_str();
}

void resolve(RunConfig& cfg, const RawFlags& raw) {
    cfg.weights = parse_weights(raw.weights);
    cfg.sigma = parse_sigma(raw.sigma);
    cfg.pmi = raw.pmi == "weighted" ? PmiMode::weighted : PmiMode::standard;
    cfg.gloss = raw.gloss == "all-pairs" ? GlossMatch::all_pairs : GlossMatch::aligned;
    cfg.leaf_score = raw.leaf_score == "product" ? LeafScore::product : LeafScore::min;
    if (!(cfg.split > 0.0 && cfg.split < 1.0)) throw UsageError("--split must lie in (0, 1)");
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["corpus"] = corpus.string();
    j["lexicon"] = lexicon.string();
    j["hierarchy"] = hierarchy.string();
    j["out"] = out.string();
    j["weights"] = {weights.visual, weights.conceptual, weights.contextual};
    j["pmi"] = pmi == PmiMode::weighted ? "weighted" : "standard";
    j["gloss_match"] = gloss == GlossMatch::all_pairs ? "all-pairs" : "aligned";
    j["sigma"] = sigma ? nlohmann::json(*sigma) : nlohmann::json("median");
    j["svm_c"] = svm_c;
    j["tol"] = tol;
    j["folds"] = folds;
    j["seed"] = seed;
    j["split"] = split;
    j["leaf_score"] = leaf_score == LeafScore::product ? "product" : "min";
    j["threshold"] = threshold;
    j["normalize_features"] = normalize_features;
    return j;
}

Weights parse_weights(const std::string& text) {
    std::vector<double> w;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            w.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("--weights: '" + part + "' is not a number");
        }
    }
    if (w.size() != 3) throw UsageError("--weights expects three comma-separated values");
    try {
        return Weights::make(w[0], w[1], w[2]);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("--weights: ") + e.what());
    }
}

std::optional<double> parse_sigma(const std::string& text) {
    if (text == "median") return std::nullopt;
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw UsageError("--sigma expects 'median' or a positive number");
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("--sigma must be positive");
    return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semantic concept hierarchies from visual, conceptual and contextual similarity", "semhier"};
    app.require_subcommand(1);

    RunConfig cfg;
    RawFlags raw;
    auto* sim = app.add_subcommand("similarity", "Write per-channel and fused similarity matrices");
    auto* build = app.add_subcommand("build", "Build the concept hierarchy");
    auto* eval = app.add_subcommand("evaluate", "Compare flat and hierarchical classifiers");
    auto* all = app.add_subcommand("all", "Split, build on the training part, evaluate on the rest");
    add_common(sim, cfg, raw, false);
    add_common(build, cfg, raw, false);
    add_common(eval, cfg, raw, true);
    add_common(all, cfg, raw, false);
    add_classify(eval, cfg, raw);
    add_classify(all, cfg, raw);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        resolve(cfg, raw);
        Pipeline p(cfg, out);
        if (sim->parsed()) {
            const auto corpus = p.load_corpus_input();
            const auto lexicon = p.load_lexicon_input();
            p.echo_config();
            p.similarity(corpus, lexicon, p.profiles(corpus, lexicon));
        } else if (build->parsed()) {
            const auto corpus = p.load_corpus_input();
            const auto lexicon = p.load_lexicon_input();
            p.echo_config();
            p.build(corpus, lexicon, p.profiles(corpus, lexicon));
        } else if (eval->parsed()) {
            const auto corpus = p.load_corpus_input();
            const auto h = load_hierarchy(cfg.hierarchy);
            p.echo_config();
            auto [train, test] = split_corpus(corpus, cfg.split, cfg.seed);
            p.evaluate(train, test, h);
        } else if (all->parsed()) {
            const auto corpus = p.load_corpus_input();
            const auto lexicon = p.load_lexicon_input();
            p.echo_config();
            auto [train, test] = split_corpus(corpus, cfg.split, cfg.seed);
            const auto leaves = p.profiles(train, lexicon);
            p.similarity(train, lexicon, leaves);
            const auto h = p.build(train, lexicon, leaves);
            p.evaluate(train, test, h);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

}  // namespace semhier::cli
