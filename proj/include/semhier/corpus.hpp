#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semhier/image_set.hpp"

namespace semhier {

struct ImageRecord {
    std::string id;
    std::vector<std::string> labels;  // sorted, unique, non-empty
    std::vector<double> features;     // bag-of-features histogram, length D

    bool operator==(const ImageRecord&) const = default;
};

// Validated, immutable annotated image collection.
class Corpus {
public:
    // Validates every record and derives the vocabulary as the sorted union
    // of labels. Duplicate labels on one image are collapsed.
    // Throws ValidationError naming the offending record.
    static Corpus from_records(std::vector<ImageRecord> images, std::size_t feature_dim);

    // Images at `indices`, keeping this corpus's vocabulary so that concept
    // indices stay aligned across train/test splits.
    Corpus subset(const std::vector<std::size_t>& indices) const;

    // Copy with each histogram scaled to unit L1 mass; all-zero rows stay zero.
    Corpus l1_normalized() const;

    const std::vector<ImageRecord>& images() const { return images_; }
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t size() const { return images_.size(); }

    std::optional<std::size_t> concept_index(const std::string& name) const;

    // Bitset of images carrying `concept` (by vocabulary index).
    ImageSet images_with(std::size_t concept_index) const;

    bool operator==(const Corpus&) const = default;

private:
    Corpus() = default;

    std::vector<ImageRecord> images_;
    std::vector<std::string> vocabulary_;
    std::size_t feature_dim_ = 0;
};

// Occurrence / co-occurrence counts over a set of concepts.
class ContextStats {
public:
    // n_i = |sets[i]|, n_ij = |sets[i] & sets[j]|, total = image_count.
    ContextStats(std::vector<std::string> concepts, const std::vector<ImageSet>& sets,
                 std::size_t image_count);

    const std::vector<std::string>& concepts() const { return concepts_; }
    std::size_t total() const { return total_; }
    std::size_t count(std::size_t i) const { return counts_[i]; }
    std::size_t joint(std::size_t i, std::size_t j) const { return joint_[i * concepts_.size() + j]; }

    // Throws UnknownConceptError.
    std::size_t index_of(const std::string& label) const;

private:
    std::vector<std::string> concepts_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> joint_;
    std::size_t total_ = 0;
};

Corpus parse_corpus_json(const std::string& text);
Corpus parse_corpus_csv(const std::string& text);

// Dispatches on extension: ".csv" reads CSV, anything else JSON.
Corpus load_corpus(const std::filesystem::path& path);

nlohmann::json corpus_to_json(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

ContextStats compute_context_stats(const Corpus& corpus);

// Images carrying at least one of `concepts`, in corpus order.
// Throws UnknownConceptError for names outside the vocabulary.
std::vector<ImageRecord> images_for(const Corpus& corpus, const std::set<std::string>& concepts);
std::vector<std::size_t> image_indices_for(const Corpus& corpus, const std::set<std::string>& concepts);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace semhier
