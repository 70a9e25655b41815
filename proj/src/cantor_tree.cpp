#include "frostman/cantor_tree.hpp"

#include <json.hpp>

#include <algorithm>

namespace frostman {

using ordered_json = nlohmann::ordered_json;

void sort_stage_words(std::vector<uint64_t>& words, int d) {
  size_t sd = size_t(d);
  size_t n = words.size() / sd;
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return std::lexicographical_compare(words.begin() + long(a * sd),
                                        words.begin() + long(a * sd + sd),
                                        words.begin() + long(b * sd),
                                        words.begin() + long(b * sd + sd));
  });
  std::vector<uint64_t> out(words.size());
  for (size_t i = 0; i < n; ++i)
    std::copy(words.begin() + long(idx[i] * sd), words.begin() + long(idx[i] * sd + sd),
              out.begin() + long(i * sd));
  words.swap(out);
}

size_t find_stage_word(const std::vector<uint64_t>& words, int d, const uint64_t* key) {
  size_t sd = size_t(d);
  size_t lo = 0, hi = words.size() / sd;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (std::lexicographical_compare(words.begin() + long(mid * sd),
                                     words.begin() + long(mid * sd + sd), key, key + d))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < words.size() / sd && std::equal(key, key + d, words.begin() + long(lo * sd)))
    return lo;
  return size_t(-1);
}

std::vector<uint64_t> flatten(const CubeIndex& idx, const ScaleSchedule& s) {
  if (idx.stage < 1 || idx.stage > s.K) throw ConfigError("flatten: stage out of range");
  if (idx.d != s.d) throw ConfigError("flatten: dimension mismatch");
  std::vector<uint64_t> words(size_t(s.d), 0);
  for (int j = 1; j <= idx.stage; ++j) {
    uint64_t nj = s.Nk[size_t(j - 1)];
    for (int a = 0; a < s.d; ++a) {
      uint32_t dig = idx.digit(j, a);
      if (dig < 1 || dig > nj) throw ConfigError("flatten: digit out of [1,N_j]");
      words[size_t(a)] = words[size_t(a)] * nj + (dig - 1);
    }
  }
  return words;
}

CubeIndex unflatten(const uint64_t* words, int stage, const ScaleSchedule& s) {
  CubeIndex idx;
  idx.stage = stage;
  idx.d = s.d;
  idx.digits.assign(size_t(stage) * size_t(s.d), 1);
  std::vector<uint64_t> w(words, words + s.d);
  for (int j = stage; j >= 1; --j) {
    uint64_t nj = s.Nk[size_t(j - 1)];
    for (int a = 0; a < s.d; ++a) {
      idx.digits[size_t(j - 1) * size_t(s.d) + size_t(a)] = uint32_t(w[size_t(a)] % nj) + 1;
      w[size_t(a)] /= nj;
    }
  }
  return idx;
}

std::vector<double> anchor(const CubeIndex& idx, const ScaleSchedule& s) {
  std::vector<uint64_t> words = flatten(idx, s);
  std::vector<double> x(size_t(s.d));
  double m = double(s.M(idx.stage));
  for (int a = 0; a < s.d; ++a) x[size_t(a)] = double(words[size_t(a)]) / m;
  return x;
}

CantorTree make_tree(const ScaleSchedule& schedule) {
  CantorTree t;
  t.schedule = schedule;
  return t;
}

CantorTree full_tree(const ScaleSchedule& schedule) {
  CantorTree t = make_tree(schedule);
  for (int k = 1; k <= schedule.K; ++k) refine_stage(t, k, [](const uint64_t*) { return true; });
  return t;
}

StageMeasure stage_measure(const CantorTree& tree, int k) {
  if (k < 1 || k > tree.depth()) throw ConfigError("stage_measure: stage out of range");
  if (tree.count(k) == 0) throw ConfigError("stage_measure: stage " + std::to_string(k) + " is extinct (zero mass)");
  StageMeasure m;
  m.d = tree.schedule.d;
  m.stage = k;
  m.log2_delta = tree.schedule.log2_delta[size_t(k - 1)];
  m.M = tree.schedule.M(k);
  m.P = tree.count(k);
  m.atoms = tree.stages[size_t(k - 1)];
  return m;
}

std::string serialize_tree(const CantorTree& tree) {
  const ScaleSchedule& s = tree.schedule;
  ordered_json j;
  j["schedule"] = ordered_json::object();
  j["schedule"]["preset"] = preset_name(s.preset);
  j["schedule"]["N"] = s.N;
  j["schedule"]["d"] = s.d;
  j["schedule"]["K"] = s.K;
  j["schedule"]["shape_param"] = s.shape;
  if (s.preset == Preset::custom) {
    j["schedule"]["Nk"] = s.Nk;
    j["schedule"]["pk"] = s.pk;
  }
  j["pinned_origin"] = tree.pinned_origin;
  ordered_json stages = ordered_json::array();
  for (const auto& st : tree.stages) {
    ordered_json arr = ordered_json::array();
    for (uint64_t w : st) arr.push_back(std::to_string(w));
    stages.push_back(std::move(arr));
  }
  j["stages"] = std::move(stages);
  return j.dump();
}

CantorTree deserialize_tree(const std::string& bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("tree parse error: ") + e.what());
  }
  if (!j.contains("schedule") || !j.contains("stages"))
    throw ConfigError("tree parse error: missing schedule or stages");
  const auto& js = j["schedule"];
  Preset preset = parse_preset(js.at("preset").get<std::string>());
  ScaleSchedule sched;
  if (preset == Preset::custom)
    sched = custom_schedule(js.at("d").get<int>(), js.at("Nk").get<std::vector<uint64_t>>(),
                            js.value("pk", std::vector<double>{}));
  else
    sched = build_schedule(preset, js.at("N").get<uint64_t>(), js.at("shape_param").get<double>(),
                           js.at("d").get<int>(), js.at("K").get<int>());
  CantorTree t = make_tree(sched);
  t.pinned_origin = j.value("pinned_origin", false);
  const auto& stages = j["stages"];
  if (stages.empty()) throw ConfigError("tree parse error: no stages");
  if (int(stages.size()) > sched.K) throw ConfigError("tree parse error: more stages than K");
  size_t d = size_t(sched.d);
  for (size_t k = 1; k <= stages.size(); ++k) {
    const auto& arr = stages[k - 1];
    if (arr.size() % d != 0)
      throw ConfigError("tree parse error: stage " + std::to_string(k) + " word count not divisible by d");
    std::vector<uint64_t> st;
    st.reserve(arr.size());
    for (const auto& v : arr) st.push_back(std::stoull(v.get<std::string>()));
    uint64_t M = sched.M(int(k));
    uint64_t nk = sched.Nk[k - 1];
    const std::vector<uint64_t>* prev = (k == 1) ? nullptr : &t.stages[k - 2];
    std::vector<uint64_t> pw(d);
    for (size_t i = 0; i < st.size() / d; ++i) {
      for (size_t a = 0; a < d; ++a) {
        uint64_t w = st[i * d + a];
        if (w >= M)
          throw ConfigError("tree parse error: word out of range at stage " + std::to_string(k));
      }
      if (prev) {
        // Nesting: the parent words must appear in the (sorted) previous stage.
        for (size_t a = 0; a < d; ++a) pw[a] = st[i * d + a] / nk;
        size_t lo = 0, hi = prev->size() / d;
        bool found = false;
        while (lo < hi) {
          size_t mid = (lo + hi) / 2;
          auto base = prev->begin() + long(mid * d);
          if (std::lexicographical_compare(base, base + long(d), pw.begin(), pw.end()))
            lo = mid + 1;
          else if (std::equal(pw.begin(), pw.end(), base)) {
            found = true;
            break;
          } else
            hi = mid;
        }
        if (!found)
          throw ConfigError("orphan cube at stage " + std::to_string(k) + ", entry " + std::to_string(i));
      }
    }
    t.stages.push_back(std::move(st));
    t.P.push_back(t.stages.back().size() / d);
  }
  return t;
}

}  // namespace frostman
