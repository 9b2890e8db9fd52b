#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "skillroute/serialize.hpp"

namespace skillroute {

namespace fs = std::filesystem;

const SubjectEntry& Manifest::subject(const std::string& id) const {
  for (const SubjectEntry& s : subjects) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::UnknownSubject, "subject '" + id + "' is not in the manifest");
}

bool Manifest::contains(const std::string& id) const {
  for (const SubjectEntry& s : subjects) {
    if (s.id == id) return true;
  }
  return false;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

fs::path resolve(const json& j, const char* key, const fs::path& base, const std::string& id) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::ParseError, "subject '" + id + "' lacks '" + key + "'");
  }
  fs::path p = j.at(key).get<std::string>();
  if (p.is_relative()) p = base / p;
  std::error_code ec;
  if (!fs::exists(p, ec)) {
    throw Error(ErrorCode::MissingFile, "subject '" + id + "': " + p.string());
  }
  return p;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  const json doc = parse_json(text);
  Manifest m;
  try {
    if (doc.contains("normalization")) m.normalization = doc.at("normalization").get<NormalizationMode>();
    if (doc.contains("label_remap") && !doc.at("label_remap").is_null()) {
      std::map<long long, int> remap;
      for (const auto& [key, value] : doc.at("label_remap").items()) {
        const int target = value.get<int>();
        if (target < 0 || target > 3) {
          throw Error(ErrorCode::ParseError, "label_remap target must be in 0..3");
        }
        remap[std::stoll(key)] = target;
      }
      m.label_remap = std::move(remap);
    }

    std::set<std::string> seen;
    for (const json& s : doc.at("subjects")) {
      SubjectEntry e;
      e.id = s.at("id").get<std::string>();
      if (e.id.empty()) throw Error(ErrorCode::ParseError, "empty subject id");
      if (!seen.insert(e.id).second) {
        throw Error(ErrorCode::DuplicateSubject, "subject id '" + e.id + "' appears twice");
      }
      if (s.contains("phantom")) {
        e.phantom = s.at("phantom").get<PhantomSpec>();
        e.phantom->validate();
      } else {
        e.volume = resolve(s, "volume", base_dir, e.id);
        e.mask = resolve(s, "mask", base_dir, e.id);
        e.labels = resolve(s, "labels", base_dir, e.id);
      }
      m.subjects.push_back(std::move(e));
    }

    if (doc.contains("splits")) {
      for (const json& s : doc.at("splits")) {
        Split split = s.get<Split>();
        validate_split(split, m);
        m.splits.push_back(std::move(split));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ParseError, std::string("bad label_remap key: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

void validate_split(const Split& split, const Manifest& manifest) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::SplitInvalid, "split '" + split.name + "': " + msg);
  };
  if (split.train_ids.empty()) fail("empty training set");
  if (split.test_ids.empty()) fail("empty test set");
  std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
  std::set<std::string> test(split.test_ids.begin(), split.test_ids.end());
  if (train.size() != split.train_ids.size() || test.size() != split.test_ids.size()) {
    fail("repeated subject id");
  }
  for (const std::string& id : split.train_ids) {
    if (!manifest.contains(id)) fail("unknown subject '" + id + "'");
    if (test.contains(id)) fail("subject '" + id + "' is in both train and test");
  }
  for (const std::string& id : split.test_ids) {
    if (!manifest.contains(id)) fail("unknown subject '" + id + "'");
  }
}

std::vector<Split> parse_splits(const std::string& text, const Manifest& manifest) {
  const json doc = parse_json(text);
  std::vector<Split> splits;
  try {
    const json& list = doc.is_object() ? doc.at("splits") : doc;
    for (const json& s : list) {
      Split split = s.get<Split>();
      validate_split(split, manifest);
      splits.push_back(std::move(split));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return splits;
}

std::vector<Split> load_splits(const fs::path& path, const Manifest& manifest) {
  return parse_splits(read_file(path), manifest);
}

LabelVolume remap_labels(const RawVolume& raw, const std::map<long long, int>& remap) {
  std::vector<std::uint8_t> labels(raw.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = raw.values[i];
    const auto it = v == std::floor(v) ? remap.find(static_cast<long long>(v)) : remap.end();
    if (it == remap.end()) {
      throw Error(ErrorCode::LabelOutOfRange, "label value " + std::to_string(v) + " has no remap entry");
    }
    labels[i] = static_cast<std::uint8_t>(it->second);
  }
  return LabelVolume(raw.geometry, std::move(labels));
}

SubjectData load_subject(const Manifest& manifest, const std::string& id) {
  const SubjectEntry& e = manifest.subject(id);
  if (e.phantom) {
    Phantom p = generate_phantom(*e.phantom);
    return {id, std::move(p.volume), std::move(p.mask), std::move(p.labels)};
  }
  SubjectData d{id, load_scalar(e.volume), load_mask(e.mask), {}};
  d.labels = manifest.label_remap ? remap_labels(read_raw(e.labels), *manifest.label_remap)
                                  : load_labels(e.labels);
  require_same_dims(d.volume, d.mask, "subject '" + id + "' mask");
  require_same_dims(d.volume, d.labels, "subject '" + id + "' labels");
  return d;
}

}  // namespace skillroute
