#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semhier/corpus.hpp"
#include "semhier/fusion.hpp"
#include "semhier/lexicon.hpp"
#include "semhier/random.hpp"

namespace semhier::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

double uniform(Rng& rng);               // [0, 1)
double gaussian(Rng& rng);              // standard normal, Box-Muller

// Image records from label sets only; features are a single zero column.
Corpus label_corpus(const std::vector<std::vector<std::string>>& label_sets);

// Random label sets over concepts "c0".."c{n-1}"; every concept used at
// least once when images >= concepts.
Corpus random_label_corpus(Rng& rng, std::size_t images, std::size_t concepts);

// Small lexicon from a compact description: {id: {"hyper": [...], "gloss": "...",
// "lemmas": [...], "rel": {...}}} rooted at `root`.
Lexicon make_lexicon(const nlohmann::json& synsets, const std::string& root,
                     const nlohmann::json& senses = nlohmann::json::object());

// Random tree-shaped taxonomy: synset "s0" is the root, each "s{k}" picks a
// random hypernym among s0..s{k-1}. With `extra_parents`, some nodes get a
// second hypernym (diamonds).
nlohmann::json random_taxonomy_json(Rng& rng, std::size_t synsets, bool extra_parents);

// Three semantic clusters of four leaves each:
//   animal:    dog, wolf (canine), cat, lion (feline)
//   vehicle:   car, truck (automobile), boat, ship (vessel)
//   furniture: chair, sofa (seat), table, desk (table_group)
nlohmann::json clustered_lexicon_json();
const std::vector<std::string>& clustered_concepts();
// Cluster index (0..2) of a clustered concept.
std::size_t cluster_of(const std::string& concept_name);

struct ClusteredSpec {
    std::size_t images = 600;
    std::size_t dim = 24;
    double cluster_strength = 1.0;
    double concept_strength = 0.8;
    double noise = 0.25;
    double secondary_rate = 0.35;  // chance of a second label from the same cluster
    std::uint64_t seed = 1;
};

// Seeded synthetic corpus over clustered_concepts(): each image has one
// primary concept, features = cluster block + concept signature + noise.
Corpus clustered_corpus(const ClusteredSpec& spec);

// Six leaves for the hand-traced build: dog, wolf, cat (animals) and car,
// truck, bus (vehicles), with fixed centroids and image sets.
struct SixLeafFixture {
    Lexicon lexicon;
    std::vector<ConceptProfile> leaves;
    std::size_t image_count = 0;
};
SixLeafFixture six_leaf_fixture();
nlohmann::json six_leaf_lexicon_json();

// Six polysemous concepts (bank, branch, money, river, tree, wheel) with
// part/whole relations stated from one side or both.
nlohmann::json hand_lexicon_json();
const std::vector<std::string>& hand_concepts();

// Random hierarchy-build input: a taxonomy document, its parsed lexicon and
// `concepts` leaves "k0".."k{n-1}" with one or two random senses, random
// centroids and non-empty random image sets.
struct RandomBuildInput {
    nlohmann::json lexicon_doc;
    Lexicon lexicon;
    std::vector<ConceptProfile> leaves;
    std::size_t image_count = 0;
};
RandomBuildInput random_build_input(Rng& rng, std::size_t concepts);

// Source directory of test data files.
std::filesystem::path data_dir();

}  // namespace semhier::testing
