// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "zoomkit/error.hpp"

namespace zoomkit {

namespace {

double to_cell(const std::vector<double>& edges, double px) {
  const auto n = static_cast<double>(edges.size() - 1);
  if (px <= edges.front()) return 0.0;
  if (px >= edges.back()) return n;
  const auto it = std::upper_bound(edges.begin(), edges.end(), px);
  const auto idx = static_cast<std::size_t>(it - edges.begin()) - 1;
  return static_cast<double>(idx) + (px - edges[idx]) / (edges[idx + 1] - edges[idx]);
}

// Number of one-cell-stride placements of a window `size` cells long.
std::int64_t placements(std::int64_t cells, double size) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(cells) - size + 1e-9)) + 1;
}

constexpr std::string_view kPunctuation = ";/[]\"{}()=+\\_-><@`,?!";

const std::unordered_map<std::string, std::string>& number_words() {
  static const std::unordered_map<std::string, std::string> table = {
      {"none", "0"}, {"zero", "0"}, {"one", "1"}, {"two", "2"},   {"three", "3"}, {"four", "4"},
      {"five", "5"}, {"six", "6"},  {"seven", "7"}, {"eight", "8"}, {"nine", "9"},  {"ten", "10"}};
  return table;
}

const std::unordered_map<std::string, std::string>& contractions() {
  static const std::unordered_map<std::string, std::string> table = {
      {"aint", "ain't"}, {"arent", "aren't"}, {"cant", "can't"}, {"couldve", "could've"},
      {"couldnt", "couldn't"}, {"couldn'tve", "couldn't've"}, {"couldnt've", "couldn't've"},
      {"didnt", "didn't"}, {"doesnt", "doesn't"}, {"dont", "don't"}, {"hadnt", "hadn't"},
      {"hadnt've", "hadn't've"}, {"hadn'tve", "hadn't've"}, {"hasnt", "hasn't"},
      {"havent", "haven't"}, {"hed", "he'd"}, {"hed've", "he'd've"}, {"he'dve", "he'd've"},
      {"hes", "he's"}, {"howd", "how'd"}, {"howll", "how'll"}, {"hows", "how's"},
      {"Id've", "I'd've"}, {"I'dve", "I'd've"}, {"Im", "I'm"}, {"Ive", "I've"},
      {"isnt", "isn't"}, {"itd", "it'd"}, {"itd've", "it'd've"}, {"it'dve", "it'd've"},
      {"itll", "it'll"}, {"let's", "let's"}, {"maam", "ma'am"}, {"mightnt", "mightn't"},
      {"mightnt've", "mightn't've"}, {"mightn'tve", "mightn't've"}, {"mightve", "might've"},
      {"mustnt", "mustn't"}, {"mustve", "must've"}, {"neednt", "needn't"}, {"notve", "not've"},
      {"oclock", "o'clock"}, {"oughtnt", "oughtn't"}, {"ow's'at", "'ow's'at"},
      {"'ows'at", "'ow's'at"}, {"'ow'sat", "'ow's'at"}, {"shant", "shan't"},
      {"shed've", "she'd've"}, {"she'dve", "she'd've"}, {"she's", "she's"},
      {"shouldve", "should've"}, {"shouldnt", "shouldn't"}, {"shouldnt've", "shouldn't've"},
      {"shouldn'tve", "shouldn't've"}, {"somebody'd", "somebodyd"},
      {"somebodyd've", "somebody'd've"}, {"somebody'dve", "somebody'd've"},
      {"somebodyll", "somebody'll"}, {"somebodys", "somebody's"}, {"someoned", "someone'd"},
      {"someoned've", "someone'd've"}, {"someone'dve", "someone'd've"},
      {"someonell", "someone'll"}, {"someones", "someone's"}, {"somethingd", "something'd"},
      {"somethingd've", "something'd've"}, {"something'dve", "something'd've"},
      {"somethingll", "something'll"}, {"thats", "that's"}, {"thered", "there'd"},
      {"thered've", "there'd've"}, {"there'dve", "there'd've"}, {"therere", "there're"},
      {"theres", "there's"}, {"theyd", "they'd"}, {"theyd've", "they'd've"},
      {"they'dve", "they'd've"}, {"theyll", "they'll"}, {"theyre", "they're"},
      {"theyve", "they've"}, {"twas", "'twas"}, {"wasnt", "wasn't"}, {"wed've", "we'd've"},
      {"we'dve", "we'd've"}, {"weve", "we've"}, {"werent", "weren't"}, {"whatll", "what'll"},
      {"whatre", "what're"}, {"whats", "what's"}, {"whatve", "what've"}, {"whens", "when's"},
      {"whered", "where'd"}, {"wheres", "where's"}, {"whereve", "where've"}, {"whod", "who'd"},
      {"whod've", "who'd've"}, {"who'dve", "who'd've"}, {"wholl", "who'll"}, {"whos", "who's"},
      {"whove", "who've"}, {"whyll", "why'll"}, {"whyre", "why're"}, {"whys", "why's"},
      {"wont", "won't"}, {"wouldve", "would've"}, {"wouldnt", "wouldn't"},
      {"wouldnt've", "wouldn't've"}, {"wouldn'tve", "wouldn't've"}, {"yall", "y'all"},
      {"yall'll", "y'all'll"}, {"y'allll", "y'all'll"}, {"yall'd've", "y'all'd've"},
      {"y'alld've", "y'all'd've"}, {"y'all'dve", "y'all'd've"}, {"youd", "you'd"},
      {"youd've", "you'd've"}, {"you'dve", "you'd've"}, {"youll", "you'll"},
      {"youre", "you're"}, {"youve", "you've"}};
  return table;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool has_digit_comma_digit(const std::string& s) {
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == ',' && is_digit(s[i - 1]) && is_digit(s[i + 1])) return true;
  }
  return false;
}

std::string process_punctuation(const std::string& in) {
  const bool digit_comma = has_digit_comma_digit(in);
  std::string out = in;
  for (char p : kPunctuation) {
    // The spacing test looks at the original text, the replacement at the
    // progressively rewritten one.
    const bool spaced = in.find(std::string{p, ' '}) != std::string::npos ||
                        in.find(std::string{' ', p}) != std::string::npos;
    std::string next;
    next.reserve(out.size());
    for (char c : out) {
      if (c != p) {
        next.push_back(c);
      } else if (!(spaced || digit_comma)) {
        next.push_back(' ');
      }
    }
    out = std::move(next);
  }
  std::string stripped;
  stripped.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '.' && !(i + 1 < out.size() && is_digit(out[i + 1]))) continue;
    stripped.push_back(out[i]);
  }
  return stripped;
}

std::string process_digit_article(const std::string& in) {
  std::string lowered = in;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::istringstream words(lowered);
  std::vector<std::string> kept;
  for (std::string word; words >> word;) {
    if (auto it = number_words().find(word); it != number_words().end()) word = it->second;
    if (word == "a" || word == "an" || word == "the") continue;
    kept.push_back(word);
  }
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (auto it = contractions().find(kept[i]); it != contractions().end()) kept[i] = it->second;
    if (i) out.push_back(' ');
    out += kept[i];
  }
  return out;
}

}  // namespace

Partition size_partition(const BBox& gt_bbox, std::int64_t image_w, std::int64_t image_h) {
  if (gt_bbox.w <= 0 || gt_bbox.h <= 0 || image_w <= 0 || image_h <= 0) {
    fail(ErrorCode::kDegenerateInput, "bbox and image must have positive area");
  }
  const double s = static_cast<double>(gt_bbox.area()) / static_cast<double>(image_w * image_h);
  if (s < kSmallUpperBound) return Partition::kSmall;
  if (s < kMediumUpperBound) return Partition::kMedium;
  return Partition::kLarge;
}

double fractional_window_sum(const ImportanceMap& map, double x0, double x1, double y0, double y1) {
  double acc = 0.0;
  const auto r_begin = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(y0)));
  const auto r_end = std::min<std::int64_t>(map.rows, static_cast<std::int64_t>(std::ceil(y1)));
  const auto c_begin = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(x0)));
  const auto c_end = std::min<std::int64_t>(map.cols, static_cast<std::int64_t>(std::ceil(x1)));
  for (std::int64_t r = r_begin; r < r_end; ++r) {
    const double wy = std::min<double>(static_cast<double>(r + 1), y1) - std::max<double>(static_cast<double>(r), y0);
    if (wy <= 0.0) continue;
    for (std::int64_t c = c_begin; c < c_end; ++c) {
      const double wx = std::min<double>(static_cast<double>(c + 1), x1) - std::max<double>(static_cast<double>(c), x0);
      if (wx <= 0.0) continue;
      acc += map.at(r, c) * wx * wy;
    }
  }
  return acc;
}

double attention_ratio(const ImportanceMap& map, const BBox& gt_bbox, std::int64_t image_w,
                       std::int64_t image_h) {
  if (map.empty()) fail(ErrorCode::kEmptyMap, "importance map is empty");
  if (gt_bbox.w <= 0 || gt_bbox.h <= 0) fail(ErrorCode::kDegenerateBBox, "bbox has non-positive size");
  if (gt_bbox.x < 0 || gt_bbox.y < 0 || gt_bbox.right() > image_w || gt_bbox.bottom() > image_h) {
    fail(ErrorCode::kOutOfBounds, "ground-truth bbox is not inside the image");
  }
  const double x0 = to_cell(map.col_edges, static_cast<double>(gt_bbox.x));
  const double x1 = to_cell(map.col_edges, static_cast<double>(gt_bbox.right()));
  const double y0 = to_cell(map.row_edges, static_cast<double>(gt_bbox.y));
  const double y1 = to_cell(map.row_edges, static_cast<double>(gt_bbox.bottom()));
  const double w = x1 - x0;
  const double h = y1 - y0;
  const double inside = fractional_window_sum(map, x0, x1, y0, y1);

  const std::int64_t nx = placements(map.cols, w);
  const std::int64_t ny = placements(map.rows, h);
  double total = 0.0;
  for (std::int64_t v = 0; v < ny; ++v) {
    for (std::int64_t u = 0; u < nx; ++u) {
      const auto fu = static_cast<double>(u);
      const auto fv = static_cast<double>(v);
      total += fractional_window_sum(map, fu, fu + w, fv, fv + h);
    }
  }
  const double mean = total / static_cast<double>(nx * ny);
  if (mean == 0.0) return 1.0;
  return inside / mean;
}

std::string normalize_answer(std::string_view answer) {
  std::string text(answer);
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\t', ' ');
  const auto first = text.find_first_not_of(" \r\f\v");
  const auto last = text.find_last_not_of(" \r\f\v");
  text = first == std::string::npos ? std::string() : text.substr(first, last - first + 1);
  return process_digit_article(process_punctuation(text));
}

double vqa_score(std::string_view prediction, std::span<const std::string> gt_answers) {
  const std::string pred = normalize_answer(prediction);
  int matches = 0;
  for (const auto& gt : gt_answers) {
    if (normalize_answer(gt) == pred) ++matches;
  }
  return std::min(static_cast<double>(matches) / 3.0, 1.0);
}

int exact_match(std::string_view prediction, std::string_view gt_answer) {
  return normalize_answer(prediction) == normalize_answer(gt_answer) ? 1 : 0;
}

MeanCi mean_ci(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kEmptyInput, "mean_ci needs at least one value");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0, 1};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n), values.size()};
}

std::string_view split_name(RatioSplit split) {
  switch (split) {
    case RatioSplit::kCorrect: return "correct";
    case RatioSplit::kIncorrect: return "incorrect";
    case RatioSplit::kAll: return "all";
  }
  return "unknown";
}

}  // namespace zoomkit
