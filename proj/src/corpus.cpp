#include "semhier/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "semhier/error.hpp"

namespace semhier {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& record_id) {
    const std::string t = trim(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParseError("record '" + record_id + "': feature '" + t + "' is not a number");
    }
    if (used != t.size()) {
        throw ParseError("record '" + record_id + "': feature '" + t + "' is not a number");
    }
    return v;
}

}  // namespace

Corpus Corpus::from_records(std::vector<ImageRecord> images, std::size_t feature_dim) {
    if (images.empty()) throw ValidationError("corpus has no images");
    if (feature_dim == 0) throw ValidationError("feature_dim must be positive");

    std::unordered_set<std::string> ids;
    std::set<std::string> vocab;
    for (auto& rec : images) {
        if (rec.id.empty()) throw ValidationError("image with empty id");
        if (!ids.insert(rec.id).second) {
            throw ValidationError("record '" + rec.id + "': duplicate image id");
        }
        std::sort(rec.labels.begin(), rec.labels.end());
        rec.labels.erase(std::unique(rec.labels.begin(), rec.labels.end()), rec.labels.end());
        if (rec.labels.empty()) throw ValidationError("record '" + rec.id + "': empty label set");
        for (const auto& l : rec.labels) {
            if (l.empty()) throw ValidationError("record '" + rec.id + "': empty label name");
            vocab.insert(l);
        }
        if (rec.features.size() != feature_dim) {
            throw ValidationError("record '" + rec.id + "': feature dimension " +
                                  std::to_string(rec.features.size()) + " does not match corpus dimension " +
                                  std::to_string(feature_dim));
        }
        for (double f : rec.features) {
            if (!std::isfinite(f)) throw ValidationError("record '" + rec.id + "': non-finite feature value");
            if (f < 0.0) throw ValidationError("record '" + rec.id + "': negative feature value");
        }
    }
    if (vocab.size() < 2) {
        throw ValidationError("corpus vocabulary needs at least 2 concepts, found " + std::to_string(vocab.size()));
    }

    Corpus c;
    c.images_ = std::move(images);
    c.vocabulary_.assign(vocab.begin(), vocab.end());
    c.feature_dim_ = feature_dim;
    return c;
}

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
    Corpus c;
    c.vocabulary_ = vocabulary_;
    c.feature_dim_ = feature_dim_;
    c.images_.reserve(indices.size());
    for (auto i : indices) c.images_.push_back(images_.at(i));
    return c;
}

std::optional<std::size_t> Corpus::concept_index(const std::string& name) const {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), name);
    if (it == vocabulary_.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - vocabulary_.begin());
}

ImageSet Corpus::images_with(std::size_t concept_index) const {
    const std::string& name = vocabulary_.at(concept_index);
    ImageSet s(images_.size());
    for (std::size_t k = 0; k < images_.size(); ++k) {
        const auto& labels = images_[k].labels;
        if (std::binary_search(labels.begin(), labels.end(), name)) s.insert(k);
    }
    return s;
}

ContextStats::ContextStats(std::vector<std::string> concepts, const std::vector<ImageSet>& sets,
                           std::size_t image_count)
    : concepts_(std::move(concepts)), total_(image_count) {
    const std::size_t n = concepts_.size();
    counts_.resize(n);
    joint_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        counts_[i] = sets[i].count();
        joint_[i * n + i] = counts_[i];
        for (std::size_t j = 0; j < i; ++j) {
            const std::size_t c = sets[i].intersection_count(sets[j]);
            joint_[i * n + j] = c;
            joint_[j * n + i] = c;
        }
    }
}

std::size_t ContextStats::index_of(const std::string& label) const {
    auto it = std::find(concepts_.begin(), concepts_.end(), label);
    if (it == concepts_.end()) throw UnknownConceptError("unknown concept '" + label + "'");
    return static_cast<std::size_t>(it - concepts_.begin());
}

Corpus parse_corpus_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("corpus JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("feature_dim") || !doc.contains("images")) {
        throw ParseError("corpus JSON: expected an object with 'feature_dim' and 'images'");
    }
    if (!doc["feature_dim"].is_number_unsigned()) throw ParseError("corpus JSON: 'feature_dim' must be a non-negative integer");
    if (!doc["images"].is_array()) throw ParseError("corpus JSON: 'images' must be an array");

    std::vector<ImageRecord> records;
    std::size_t position = 0;
    for (const auto& item : doc["images"]) {
        const std::string where = "corpus JSON: image #" + std::to_string(position++);
        if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
            throw ParseError(where + ": missing string 'id'");
        }
        ImageRecord rec;
        rec.id = item["id"].get<std::string>();
        const auto labels = item.find("labels");
        const auto feats = item.find("features");
        if (labels == item.end() || !labels->is_array()) {
            throw ParseError("record '" + rec.id + "': 'labels' must be an array");
        }
        if (feats == item.end() || !feats->is_array()) {
            throw ParseError("record '" + rec.id + "': 'features' must be an array");
        }
        for (const auto& l : *labels) {
            if (!l.is_string()) throw ParseError("record '" + rec.id + "': label is not a string");
            rec.labels.push_back(l.get<std::string>());
        }
        for (const auto& f : *feats) {
            if (!f.is_number()) throw ParseError("record '" + rec.id + "': feature is not a number");
            rec.features.push_back(f.get<double>());
        }
        records.push_back(std::move(rec));
    }
    return Corpus::from_records(std::move(records), doc["feature_dim"].get<std::size_t>());
}

Corpus parse_corpus_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("corpus CSV: empty file");
    const auto header = split(trim(line), ',');
    if (header.size() < 3 || trim(header[0]) != "id" || trim(header[1]) != "labels") {
        throw ParseError("corpus CSV: header must be 'id,labels,f0,...'");
    }
    const std::size_t dim = header.size() - 2;

    std::vector<ImageRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        ImageRecord rec;
        rec.id = trim(fields[0]);
        if (fields.size() != header.size()) {
            throw ParseError("corpus CSV line " + std::to_string(line_no) + " (record '" + rec.id + "'): expected " +
                             std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        for (const auto& l : split(fields[1], ';')) {
            const auto t = trim(l);
            if (!t.empty()) rec.labels.push_back(t);
        }
        for (std::size_t k = 2; k < fields.size(); ++k) rec.features.push_back(parse_number(fields[k], rec.id));
        records.push_back(std::move(rec));
    }
    return Corpus::from_records(std::move(records), dim);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Corpus load_corpus(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    if (path.extension() == ".csv") return parse_corpus_csv(text);
    return parse_corpus_json(text);
}

nlohmann::json corpus_to_json(const Corpus& corpus) {
    nlohmann::json images = nlohmann::json::array();
    for (const auto& rec : corpus.images()) {
        images.push_back({{"id", rec.id}, {"labels", rec.labels}, {"features", rec.features}});
    }
    return {{"feature_dim", corpus.feature_dim()}, {"images", std::move(images)}};
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << corpus_to_json(corpus).dump() << '\n';
}

ContextStats compute_context_stats(const Corpus& corpus) {
    std::vector<ImageSet> sets;
    sets.reserve(corpus.vocabulary().size());
    for (std::size_t i = 0; i < corpus.vocabulary().size(); ++i) sets.push_back(corpus.images_with(i));
    return ContextStats(corpus.vocabulary(), sets, corpus.size());
}

std::vector<std::size_t> image_indices_for(const Corpus& corpus, const std::set<std::string>& concepts) {
    for (const auto& c : concepts) {
        if (!corpus.concept_index(c)) throw UnknownConceptError("unknown concept '" + c + "'");
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        for (const auto& l : corpus.images()[k].labels) {
            if (concepts.count(l)) {
                out.push_back(k);
                break;
            }
        }
    }
    return out;
}

std::vector<ImageRecord> images_for(const Corpus& corpus, const std::set<std::string>& concepts) {
    std::vector<ImageRecord> out;
    for (auto k : image_indices_for(corpus, concepts)) out.push_back(corpus.images()[k]);
    return out;
}

Corpus Corpus::l1_normalized() const {
    Corpus c = *this;
    for (auto& rec : c.images_) {
        double mass = 0.0;
        for (double f : rec.features) mass += f;
        if (mass > 0.0) {
            for (double& f : rec.features) f /= mass;
        }
    }
    return c;
}

}  // namespace semhier
