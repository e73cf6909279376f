#include "petrank/synth.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "petrank/error.hpp"
#include "petrank/rng.hpp"

namespace petrank {
namespace {

using namespace std::chrono;

constexpr std::array<const char*, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr std::array<const char*, 6> kCourts = {"Delhi",  "Bombay",    "Madras",
                                                "Calcutta", "Allahabad", "Karnataka"};

constexpr std::array<const char*, 4> kCaseTypes = {"Writ", "Civil Revision", "Criminal Misc.",
                                                   "Special Leave"};

// None of these contain an anchor keyword.
constexpr std::array<const char*, 10> kBoilerplate = {
    "The petitioner contends that the impugned action is arbitrary and violative of the "
    "fundamental rights guaranteed under the Constitution.",
    "Learned counsel for the respondents submitted that the writ petition is not maintainable "
    "in view of the alternative remedy available under the statute.",
    "The respondents were directed to file a counter affidavit within four weeks.",
    "It is further averred that the petitioner has been deprived of the benefit without any "
    "notice or opportunity of being represented.",
    "The records of the case were called for and perused by the Registry.",
    "No interim relief was granted at the stage of admission.",
    "The petitioner seeks a writ of mandamus directing the authorities to reconsider the "
    "representation in accordance with law.",
    "Notice was issued to the respondents returnable within six weeks.",
    "The question of law raised in this petition concerns the interpretation of the relevant "
    "service rules.",
    "Copies of the relevant documents are annexed to the petition as Annexures P-1 to P-7."};

struct Ymd {
  int y;
  unsigned m;
  unsigned d;
};

Ymd to_ymd(sys_days day) {
  const year_month_day ymd{day};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

std::string render_date(sys_days day, std::size_t style) {
  const auto [y, m, d] = to_ymd(day);
  char buf[48];
  switch (style % 4) {
    case 0:
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
      break;
    case 1:
      std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", d, m, y);
      break;
    case 2:
      std::snprintf(buf, sizeof buf, "%u %s %04d", d, kMonths[m - 1], y);
      break;
    default:
      std::snprintf(buf, sizeof buf, "%s %u, %04d", kMonths[m - 1], d, y);
      break;
  }
  return buf;
}

template <std::size_t N>
const char* pick(const std::array<const char*, N>& items, Rng& rng) {
  return items[uniform_index(rng, N)];
}

// At least `min_bytes` of boilerplate, built from shuffled sentences.
std::string boilerplate(Rng& rng, std::size_t min_bytes, std::size_t extra_sentences) {
  auto order = iota_indices(kBoilerplate.size());
  shuffle(order, rng);
  std::string out;
  std::size_t used = 0;
  while (used < order.size() && (out.size() < min_bytes || extra_sentences > 0)) {
    if (out.size() >= min_bytes) --extra_sentences;
    out += ' ';
    out += kBoilerplate[order[used++]];
  }
  return out;
}

int draw_gap(Rng& rng, int max_gap) {
  const double u = uniform_unit(rng);
  const auto g = static_cast<int>(std::floor(std::exp(u * std::log(max_gap + 1.0))));
  return std::clamp(g, 1, max_gap);
}

}  // namespace

void SynthConfig::check() const {
  if (n_accepted + n_rejected == 0) throw config_error("synth: no petitions requested");
  if (max_gap < 1) throw config_error("synth.max_gap must be >= 1");
  if (!(test_fraction >= 0.0 && dev_fraction >= 0.0 && test_fraction + dev_fraction < 1.0)) {
    throw config_error("synth: test_fraction + dev_fraction must be in [0, 1)");
  }
}

SynthCorpus synthesize_corpus(const SynthConfig& cfg) {
  cfg.check();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_accepted + cfg.n_rejected;
  const sys_days first = sys_days{year{2010} / January / 1};
  const sys_days last = sys_days{year{2020} / December / 31};
  const auto span = static_cast<std::uint64_t>((last - first).count()) + 1;

  SynthCorpus out;
  out.corpus.format_tag = "csv";
  for (std::size_t i = 0; i < n; ++i) {
    const bool accepted = i < cfg.n_accepted;
    const sys_days filed = first + days{static_cast<long>(uniform_index(rng, span))};
    const int gap = draw_gap(rng, cfg.max_gap);
    const sys_days hearing = filed + days{gap};
    const sys_days caption = filed - days{1 + static_cast<long>(uniform_index(rng, 300))};
    const sys_days closing = hearing + days{1 + static_cast<long>(uniform_index(rng, 60))};
    const auto style = uniform_index(rng, 4);

    PetitionRecord rec;
    rec.label = accepted ? 1 : 0;
    rec.name = std::to_string(to_ymd(filed).y) + "_" + std::to_string(i + 1) + ".txt";

    std::string text = "IN THE HIGH COURT OF ";
    text += pick(kCourts, rng);
    text += ". ";
    text += pick(kCaseTypes, rng);
    text += " Petition No. " + std::to_string(100 + i) + ". Impugned order dated " +
            render_date(caption, style + 1) + ".";
    text += boilerplate(rng, 0, uniform_index(rng, 2));
    text += " The present petition was filed on " + render_date(filed, style) + " by the petitioner.";
    text += boilerplate(rng, 160, uniform_index(rng, 4));
    if (accepted) {
      text += " The matter was listed for hearing on " + render_date(hearing, style + 2) + ".";
      text += boilerplate(rng, 160, 0);
      text += " Certified copy issued on " + render_date(closing, style + 3) + ".";
      out.gap_days.emplace(rec.name, gap);
    } else {
      text += " The petition is dismissed in limine.";
    }
    rec.text = std::move(text);
    out.corpus.records.push_back(std::move(rec));
  }

  // Split assignment: shuffled order, test first, then dev, remainder train.
  auto order = iota_indices(n);
  shuffle(order, rng);
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * double(n)));
  const auto n_dev = static_cast<std::size_t>(std::llround(cfg.dev_fraction * double(n)));
  for (std::size_t k = 0; k < n; ++k) {
    auto& rec = out.corpus.records[order[k]];
    rec.split = k < n_test ? Split::test : (k < n_test + n_dev ? Split::dev : Split::train);
    rec.split_raw = std::string(to_string(rec.split));
  }
  return out;
}

}  // namespace petrank
