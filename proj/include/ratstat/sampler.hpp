#pragma once

// Exact sequential sampling of words w in Sigma^n with Pr(w) proportional to
// xi' mu(w) eta. With suffix vectors P_s = M^s eta and the running prefix row
// rho' = xi' mu(w_1 ... w_{j-1}), symbol sigma is drawn at position j with
// probability rho' mu(sigma) P_{n-j} / rho' P_{n-j+1}.

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/model.hpp"
#include "ratstat/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ratstat {

using Word = std::vector<int>;

class WordSampler {
 public:
  WordSampler(const PrimitiveModel& model, std::size_t n) : rep_(model.rep()), n_(n) {
    const Matrix m = rep_.total();
    suffix_.reserve(n + 1);
    log_scale_.reserve(n + 1);
    suffix_.push_back(rep_.eta / rep_.eta.maxCoeff());
    log_scale_.push_back(std::log(rep_.eta.maxCoeff()));
    for (std::size_t s = 1; s <= n; ++s) {
      Vector next = m * suffix_.back();
      const double scale = next.maxCoeff();
      if (!(scale > 0.0)) throw Error(ErrorCode::DegenerateValue, "M^s eta vanishes");
      suffix_.push_back(next / scale);
      log_scale_.push_back(log_scale_.back() + std::log(scale));
    }
  }

  std::size_t length() const { return n_; }

  /// Probabilities of each symbol (counted symbols first, uncounted last) at
  /// position j in 1..n given the prefix row. Sums to 1 up to rounding.
  Vector step_probabilities(const Vector& prefix_row, std::size_t j) const {
    const std::size_t after = n_ - j;
    const double denom = prefix_row.dot(suffix_[after + 1]) * std::exp(log_scale_[after + 1] - log_scale_[after]);
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateValue, "prefix has zero completion weight");
    Vector probs(static_cast<Eigen::Index>(rep_.alphabet_size()));
    for (std::size_t s = 0; s < rep_.alphabet_size(); ++s)
      probs(static_cast<Eigen::Index>(s)) = prefix_row.dot(rep_.symbol_matrix(s) * suffix_[after]) / denom;
    return probs;
  }

  template <class Rng>
  Word sample(Rng& rng) const {
    Word word;
    word.reserve(n_);
    Vector rho = rep_.xi / rep_.xi.maxCoeff();
    for (std::size_t j = 1; j <= n_; ++j) {
      const Vector probs = step_probabilities(rho, j);
      const double total = probs.sum();
      if (!(total > 0.0)) throw Error(ErrorCode::DegenerateValue, "all symbol probabilities vanish");
      const double u = rng.uniform() * total;
      double acc = 0.0;
      Eigen::Index pick = probs.size() - 1;
      for (Eigen::Index s = 0; s < probs.size(); ++s) {
        acc += probs(s);
        if (u < acc && probs(s) > 0.0) {
          pick = s;
          break;
        }
      }
      // Rounding can leave u >= acc; fall back to the last symbol with mass.
      while (probs(pick) <= 0.0 && pick > 0) --pick;
      word.push_back(static_cast<int>(pick));
      Vector next = rep_.symbol_matrix(static_cast<std::size_t>(pick)).transpose() * rho;
      rho = next / next.maxCoeff();
    }
    return word;
  }

  CountVector counts(const Word& word) const {
    CountVector k(rep_.ell, 0);
    for (int s : word)
      if (static_cast<std::size_t>(s) < rep_.ell) ++k[static_cast<std::size_t>(s)];
    return k;
  }

  std::string spell(const Word& word) const {
    std::string out;
    for (int s : word) out += rep_.symbol_names[static_cast<std::size_t>(s)];
    return out;
  }

 private:
  LinearRepresentation rep_;
  std::size_t n_;
  std::vector<Vector> suffix_;
  std::vector<double> log_scale_;
};

using Histogram = std::map<CountVector, std::uint64_t>;

struct SampleBatch {
  std::size_t n = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;
  Histogram histogram;
  std::vector<Word> words;  // only filled when requested
};

inline Word sample_word(const PrimitiveModel& model, std::size_t n, SplitMix64& rng) {
  return WordSampler(model, n).sample(rng);
}

/// Draws `count` words; word i uses its own stream, SplitMix64(stream_seed(seed,
/// first_stream + i)), so disjoint stream ranges merge into the full batch.
inline SampleBatch sample_counts(const PrimitiveModel& model, std::size_t n, std::uint64_t count,
                                 std::uint64_t seed, bool keep_words = false, std::uint64_t first_stream = 0) {
  if (count == 0) throw Error(ErrorCode::MalformedInput, "sample count must be at least 1");
  const WordSampler sampler(model, n);
  SampleBatch batch{n, count, seed, first_stream, {}, {}};
  for (std::uint64_t i = 0; i < count; ++i) {
    SplitMix64 rng(stream_seed(seed, first_stream + i));
    Word w = sampler.sample(rng);
    ++batch.histogram[sampler.counts(w)];
    if (keep_words) batch.words.push_back(std::move(w));
  }
  return batch;
}

inline Histogram merge_histograms(const Histogram& a, const Histogram& b) {
  Histogram out = a;
  for (const auto& [k, c] : b) out[k] += c;
  return out;
}

}  // namespace ratstat
