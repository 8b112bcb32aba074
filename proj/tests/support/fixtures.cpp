#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef SEMHIER_TEST_DATA_DIR
#define SEMHIER_TEST_DATA_DIR "tests/data"
#endif

namespace semhier::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    Rng rng(static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto p = fs::temp_directory_path() /
                 ("semhier-test-" + std::to_string(rng.next() % 1000000007) + "-" + std::to_string(counter++));
        if (fs::create_directory(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double uniform(Rng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

double gaussian(Rng& rng) {
    double u = uniform(rng);
    while (u <= 0.0) u = uniform(rng);
    const double v = uniform(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Corpus label_corpus(const std::vector<std::vector<std::string>>& label_sets) {
    std::vector<ImageRecord> records;
    for (std::size_t i = 0; i < label_sets.size(); ++i) {
        records.push_back({"img" + std::to_string(i), label_sets[i], {0.0}});
    }
    return Corpus::from_records(std::move(records), 1);
}

Corpus random_label_corpus(Rng& rng, std::size_t images, std::size_t concepts) {
    std::vector<std::vector<std::string>> sets(images);
    for (std::size_t i = 0; i < images; ++i) {
        // guarantee coverage, then sprinkle extra labels
        sets[i].push_back("c" + std::to_string(i < concepts ? i : rng.index(concepts)));
        const std::size_t extra = rng.index(3);
        for (std::size_t k = 0; k < extra; ++k) sets[i].push_back("c" + std::to_string(rng.index(concepts)));
    }
    if (images < concepts) {
        // vocabulary needs at least two concepts; the first image takes c1 too
        sets[0].push_back("c1");
    }
    return label_corpus(sets);
}

Lexicon make_lexicon(const nlohmann::json& synsets, const std::string& root, const nlohmann::json& senses) {
    nlohmann::json doc;
    doc["root"] = root;
    doc["synsets"] = nlohmann::json::object();
    for (auto it = synsets.begin(); it != synsets.end(); ++it) {
        const auto& s = it.value();
        nlohmann::json body;
        body["lemmas"] = s.value("lemmas", nlohmann::json::array({it.key()}));
        body["gloss"] = s.value("gloss", std::string());
        body["hypernyms"] = s.value("hyper", nlohmann::json::array());
        if (s.contains("rel")) body["relations"] = s["rel"];
        doc["synsets"][it.key()] = body;
    }
    doc["senses"] = senses;
    return parse_lexicon_json(doc.dump());
}

nlohmann::json random_taxonomy_json(Rng& rng, std::size_t synsets, bool extra_parents) {
    static const char* words[] = {"red",   "green", "blue",  "stone", "river", "cloud", "metal", "glass",
                                  "wood",  "paper", "light", "sound", "fast",  "slow",  "round", "sharp"};
    nlohmann::json doc;
    doc["root"] = "s0";
    doc["synsets"] = nlohmann::json::object();
    doc["senses"] = nlohmann::json::object();
    for (std::size_t k = 0; k < synsets; ++k) {
        const std::string id = "s" + std::to_string(k);
        nlohmann::json hyper = nlohmann::json::array();
        if (k > 0) {
            const auto p = rng.index(k);
            hyper.push_back("s" + std::to_string(p));
            if (extra_parents && k > 2 && rng.index(4) == 0) {
                const auto q = rng.index(k);
                if (q != p) hyper.push_back("s" + std::to_string(q));
            }
        }
        std::string gloss;
        for (std::size_t w = 0; w < 3; ++w) gloss += std::string(words[rng.index(16)]) + " ";
        doc["synsets"][id] = {{"lemmas", {id}}, {"gloss", gloss}, {"hypernyms", hyper}};
        doc["senses"]["c" + std::to_string(k)] = {id};
    }
    return doc;
}

RandomBuildInput random_build_input(Rng& rng, std::size_t concepts) {
    const std::size_t synsets = 3 * concepts;
    const std::size_t image_count = 5 * concepts;
    auto doc = random_taxonomy_json(rng, synsets, rng.index(2) == 1);
    std::vector<std::string> pool;
    for (std::size_t k = 1; k < synsets; ++k) pool.push_back("s" + std::to_string(k));
    std::vector<ConceptProfile> leaves;
    for (std::size_t c = 0; c < concepts; ++c) {
        ConceptProfile p;
        p.name = "k" + std::to_string(c);
        p.senses = rng.sample(pool, 1 + rng.index(2));
        doc["senses"][p.name] = p.senses;
        for (std::size_t d = 0; d < 4; ++d) p.centroid.push_back(uniform(rng));
        p.images = ImageSet(image_count);
        p.images.insert(rng.index(image_count));
        for (std::size_t k = 0; k < image_count; ++k) {
            if (rng.index(4) == 0) p.images.insert(k);
        }
        leaves.push_back(std::move(p));
    }
    auto lexicon = parse_lexicon_json(doc.dump());
    return {std::move(doc), std::move(lexicon), std::move(leaves), image_count};
}

// ---------------------------------------------------------------------------
// Clustered fixture

nlohmann::json clustered_lexicon_json() {
    auto syn = [](const std::string& hyper, const std::string& gloss) {
        return nlohmann::json{{"lemmas", nlohmann::json::array()}, {"gloss", gloss}, {"hypernyms", {hyper}}};
    };
    nlohmann::json s = nlohmann::json::object();
    s["entity.n.01"] = {{"lemmas", {"entity"}}, {"gloss", "that which exists"}, {"hypernyms", nlohmann::json::array()}};

    s["animal.n.01"] = syn("entity.n.01", "a living organism that feeds and moves voluntarily");
    s["canine.n.01"] = syn("animal.n.01", "a carnivorous mammal with a long snout and nonretractile claws");
    s["feline.n.01"] = syn("animal.n.01", "a carnivorous mammal with a short muzzle and retractile claws");
    s["dog.n.01"] = syn("canine.n.01", "a domesticated carnivorous mammal with a long snout kept as a pet");
    s["wolf.n.01"] = syn("canine.n.01", "a wild carnivorous mammal with a long snout that hunts in packs");
    s["cat.n.01"] = syn("feline.n.01", "a small domesticated feline mammal with soft fur kept as a pet");
    s["lion.n.01"] = syn("feline.n.01", "a large wild feline mammal with a tawny mane that hunts");

    s["vehicle.n.01"] = syn("entity.n.01", "a conveyance that transports people or goods");
    s["automobile.n.01"] = syn("vehicle.n.01", "a motor vehicle with wheels that travels on roads");
    s["vessel.n.01"] = syn("vehicle.n.01", "a craft that travels on water with a hull");
    s["car.n.01"] = syn("automobile.n.01", "a motor vehicle with four wheels carrying passengers on roads");
    s["truck.n.01"] = syn("automobile.n.01", "a large motor vehicle with wheels carrying heavy goods on roads");
    s["boat.n.01"] = syn("vessel.n.01", "a small craft with a hull that travels on water");
    s["ship.n.01"] = syn("vessel.n.01", "a large craft with a hull carrying goods across water");

    s["furniture.n.01"] = syn("entity.n.01", "household furnishings placed in a room");
    s["seat.n.01"] = syn("furniture.n.01", "furniture designed for sitting with a back and cushion");
    s["table_group.n.01"] = syn("furniture.n.01", "furniture with a flat top supported on legs");
    s["chair.n.01"] = syn("seat.n.01", "a seat with a back and legs for sitting");
    s["sofa.n.01"] = syn("seat.n.01", "an upholstered seat with a back and cushion for sitting");
    s["table.n.01"] = syn("table_group.n.01", "furniture with a flat top and legs for meals");
    s["desk.n.01"] = syn("table_group.n.01", "furniture with a flat top and legs for writing");

    for (auto it = s.begin(); it != s.end(); ++it) {
        if (it.value()["lemmas"].empty()) {
            const auto& id = it.key();
            it.value()["lemmas"] = {id.substr(0, id.find('.'))};
        }
    }
    // a second, unrelated sense for "desk" exercises disambiguation
    s["desk_office.n.01"] = syn("entity.n.01", "an office staffed to answer questions");

    nlohmann::json senses = nlohmann::json::object();
    for (const auto& c : clustered_concepts()) senses[c] = {c + ".n.01"};
    senses["desk"] = {"desk_office.n.01", "desk.n.01"};
    return {{"root", "entity.n.01"}, {"synsets", s}, {"senses", senses}};
}

const std::vector<std::string>& clustered_concepts() {
    static const std::vector<std::string> names = {"dog",  "wolf",  "cat",  "lion",  "car",   "truck",
                                                   "boat", "ship",  "chair", "sofa", "table", "desk"};
    return names;
}

std::size_t cluster_of(const std::string& concept_name) {
    const auto& names = clustered_concepts();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == concept_name) return i / 4;
    }
    throw std::out_of_range("not a clustered concept: " + concept_name);
}

Corpus clustered_corpus(const ClusteredSpec& spec) {
    const auto& names = clustered_concepts();
    const std::size_t block = spec.dim / 3;
    Rng rng(spec.seed);

    // Each concept owns two dimensions inside its cluster block.
    auto signature = [&](std::size_t c) {
        const std::size_t cluster = c / 4;
        const std::size_t within = c % 4;
        return std::pair<std::size_t, std::size_t>{cluster * block + (2 * within) % block,
                                                   cluster * block + (2 * within + 1) % block};
    };

    std::vector<ImageRecord> records;
    for (std::size_t i = 0; i < spec.images; ++i) {
        const std::size_t primary = i % names.size();
        std::vector<std::string> labels{names[primary]};
        std::vector<double> f(spec.dim, 0.0);
        for (auto& x : f) x = spec.noise * std::abs(gaussian(rng));

        const std::size_t cluster = primary / 4;
        for (std::size_t d = cluster * block; d < (cluster + 1) * block; ++d) {
            f[d] += spec.cluster_strength * (0.8 + 0.4 * uniform(rng));
        }
        const auto [a, b] = signature(primary);
        f[a] += spec.concept_strength * (0.7 + 0.6 * uniform(rng));
        f[b] += spec.concept_strength * (0.7 + 0.6 * uniform(rng));

        if (uniform(rng) < spec.secondary_rate) {
            std::size_t other = cluster * 4 + rng.index(4);
            if (other == primary) other = cluster * 4 + (primary % 4 + 1) % 4;
            labels.push_back(names[other]);
            const auto [c, d] = signature(other);
            f[c] += 0.5 * spec.concept_strength;
            f[d] += 0.5 * spec.concept_strength;
        }
        for (auto& x : f) x = std::abs(x + 0.05 * spec.noise * gaussian(rng));
        records.push_back({"img" + std::to_string(1000 + i), std::move(labels), std::move(f)});
    }
    return Corpus::from_records(std::move(records), spec.dim);
}

// ---------------------------------------------------------------------------
// Six-leaf fixture

fs::path data_dir() { return fs::path(SEMHIER_TEST_DATA_DIR); }

nlohmann::json hand_lexicon_json() {
    using nlohmann::json;
    auto syn = [](json hyper, const std::string& gloss, json rel = json::object()) {
        json body{{"lemmas", json::array()}, {"gloss", gloss}, {"hypernyms", std::move(hyper)}};
        if (!rel.empty()) body["relations"] = std::move(rel);
        return body;
    };
    json doc;
    doc["root"] = "entity.n.01";
    auto& s = doc["synsets"];
    s["entity.n.01"] = syn(json::array(), "that which exists");
    s["object.n.01"] = syn({"entity.n.01"}, "a physical thing that can be seen and touched");
    s["institution.n.01"] = syn({"entity.n.01"}, "an organization founded for a social or financial purpose");
    s["bank.n.01"] = syn({"object.n.01"}, "sloping land beside a body of water");
    s["bank.n.02"] = syn({"institution.n.01"}, "financial institution that accepts deposits of money");
    s["river.n.01"] = syn({"object.n.01"}, "a large natural stream of water", {{"meronym", {"bank.n.01"}}});
    s["money.n.01"] = syn({"object.n.01"}, "medium of exchange for deposits and payments");
    s["tree.n.01"] = syn({"object.n.01"}, "tall woody plant with a trunk and branches",
                         {{"meronym", {"branch.n.01"}}});
    s["branch.n.01"] = syn({"object.n.01"}, "woody division of a tree trunk", {{"holonym", {"tree.n.01"}}});
    s["branch.n.02"] = syn({"institution.n.01"}, "local office of a bank or financial business");
    s["vehicle.n.01"] = syn({"object.n.01"}, "a conveyance that moves people on wheels");
    s["wheel.n.01"] = syn({"object.n.01"}, "a round frame turning on an axle", {{"holonym", {"vehicle.n.01"}}});
    s["wheel.n.02"] = syn({"object.n.01"}, "the steering wheel of a vehicle", {{"hyponym", {"wheel.n.01"}}});
    doc["senses"] = {{"bank", {"bank.n.01", "bank.n.02"}},     {"branch", {"branch.n.01", "branch.n.02"}},
                     {"money", {"money.n.01"}},                {"river", {"river.n.01"}},
                     {"tree", {"tree.n.01"}},                  {"wheel", {"wheel.n.01", "wheel.n.02"}}};
    return doc;
}

const std::vector<std::string>& hand_concepts() {
    static const std::vector<std::string> c = {"bank", "branch", "money", "river", "tree", "wheel"};
    return c;
}

nlohmann::json six_leaf_lexicon_json() {
    return nlohmann::json::parse(read_text(data_dir() / "six_leaf" / "fixture.json")).at("lexicon");
}

SixLeafFixture six_leaf_fixture() {
    const auto doc = nlohmann::json::parse(read_text(data_dir() / "six_leaf" / "fixture.json"));
    SixLeafFixture fx{parse_lexicon_json(doc.at("lexicon").dump()), {}, doc.at("image_count").get<std::size_t>()};
    for (const auto& leaf : doc.at("leaves")) {
        ConceptProfile p;
        p.name = leaf.at("name").get<std::string>();
        p.centroid = leaf.at("centroid").get<std::vector<double>>();
        p.senses = fx.lexicon.senses(p.name);
        p.images = ImageSet(fx.image_count);
        for (auto k : leaf.at("images").get<std::vector<std::size_t>>()) p.images.insert(k);
        fx.leaves.push_back(std::move(p));
    }
    return fx;
}

}  // namespace semhier::testing
