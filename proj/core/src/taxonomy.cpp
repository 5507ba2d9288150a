#include "loadlens/taxonomy.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

#include "loadlens/csv.hpp"
#include "loadlens/errors.hpp"

namespace loadlens {

namespace {

const char* kEuro = "€";

std::string_view dwelling_token(Dwelling d) {
  return d == Dwelling::Apartment ? "Ap" : "H";
}

void require_increasing(const std::vector<double>& edges, const char* what) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw DomainError(std::string("category scheme: ") + what +
                        " edges must be strictly increasing");
    }
  }
}

int band_of(double value, const std::vector<double>& edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (value <= edges[i]) return static_cast<int>(i);
  }
  return static_cast<int>(edges.size());
}

}  // namespace

std::string CategoryScheme::occupancy_label(int band) const {
  int lower = band == 0 ? 1 : occupancy_uppers[static_cast<std::size_t>(band - 1)] + 1;
  std::string label = "P" + std::to_string(lower);
  if (band == static_cast<int>(occupancy_uppers.size())) label += "+";
  return label;
}

void CategoryScheme::validate() const {
  if (dwellings.empty() || ev_options.empty() || hp_options.empty()) {
    throw DomainError("category scheme: every characteristic needs at least one value");
  }
  require_increasing(house_area_edges, "house area");
  require_increasing(apartment_area_edges, "apartment area");
  require_increasing(income_edges, "income");
  if (house_area_edges.size() != apartment_area_edges.size()) {
    throw DomainError("category scheme: house and apartment area band counts differ");
  }
  for (std::size_t i = 1; i < occupancy_uppers.size(); ++i) {
    if (occupancy_uppers[i - 1] >= occupancy_uppers[i]) {
      throw DomainError("category scheme: occupancy uppers must be strictly increasing");
    }
  }
  if (!occupancy_uppers.empty() && occupancy_uppers.front() < 1) {
    throw DomainError("category scheme: occupancy bands start at 1 occupant");
  }
  if (privacy_threshold < 1) {
    throw DomainError("category scheme: privacy threshold must be >= 1");
  }
}

std::string format_code(const CategoryCode& code, const CategoryScheme& scheme) {
  std::string out;
  out += dwelling_token(code.dwelling);
  out += '_';
  out += scheme.occupancy_label(code.occupancy_band);
  out += "_A";
  out += std::to_string(code.area_band + 1);
  out += '_';
  out += kEuro;
  out += std::to_string(code.income_band + 1);
  out += code.ev ? "_EV1" : "_EV0";
  out += code.hp ? "_HP1" : "_HP0";
  return out;
}

std::optional<CategoryCode> parse_code(std::string_view text,
                                       const CategoryScheme& scheme) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t us = text.find('_', start);
    if (us == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, us - start));
    start = us + 1;
  }
  if (parts.size() != 6) return std::nullopt;

  CategoryCode code;
  if (parts[0] == "Ap") {
    code.dwelling = Dwelling::Apartment;
  } else if (parts[0] == "H") {
    code.dwelling = Dwelling::House;
  } else {
    return std::nullopt;
  }

  int occ = -1;
  for (int b = 0; b < scheme.occupancy_bands(); ++b) {
    if (parts[1] == scheme.occupancy_label(b)) {
      occ = b;
      break;
    }
  }
  if (occ < 0) return std::nullopt;
  code.occupancy_band = static_cast<std::int8_t>(occ);

  auto numbered = [](std::string_view part, std::string_view prefix,
                     int bands) -> int {
    if (part.size() <= prefix.size() || part.substr(0, prefix.size()) != prefix)
      return -1;
    auto n = csv::parse_int(part.substr(prefix.size()));
    if (!n.has_value() || *n < 1 || *n > bands) return -1;
    return static_cast<int>(*n) - 1;
  };

  int area = numbered(parts[2], "A", scheme.area_bands());
  if (area < 0) return std::nullopt;
  code.area_band = static_cast<std::int8_t>(area);

  int income = numbered(parts[3], kEuro, scheme.income_bands());
  if (income < 0) return std::nullopt;
  code.income_band = static_cast<std::int8_t>(income);

  if (parts[4] == "EV0") {
    code.ev = false;
  } else if (parts[4] == "EV1") {
    code.ev = true;
  } else {
    return std::nullopt;
  }
  if (parts[5] == "HP0") {
    code.hp = false;
  } else if (parts[5] == "HP1") {
    code.hp = true;
  } else {
    return std::nullopt;
  }
  return code;
}

std::optional<CategoryCode> assign_category(const HouseholdAttributes& attrs,
                                            const CategoryScheme& scheme) {
  if (scheme.exclude_ev_and_hp && attrs.has_ev && attrs.has_hp) {
    return std::nullopt;
  }
  auto index_of = [](const auto& values, const auto& v, const char* what) {
    auto it = std::find(values.begin(), values.end(), v);
    if (it == values.end()) {
      throw DomainError(std::string("assign_category: value not covered by scheme: ") +
                        what);
    }
    return static_cast<int>(it - values.begin());
  };
  CategoryCode code;
  index_of(scheme.dwellings, attrs.dwelling, "dwelling");
  code.dwelling = attrs.dwelling;

  int occ = static_cast<int>(scheme.occupancy_uppers.size());
  for (std::size_t i = 0; i < scheme.occupancy_uppers.size(); ++i) {
    if (attrs.occupants <= scheme.occupancy_uppers[i]) {
      occ = static_cast<int>(i);
      break;
    }
  }
  code.occupancy_band = static_cast<std::int8_t>(occ);

  const auto& area_edges = attrs.dwelling == Dwelling::House
                               ? scheme.house_area_edges
                               : scheme.apartment_area_edges;
  code.area_band = static_cast<std::int8_t>(band_of(attrs.area_sqm, area_edges));
  code.income_band =
      static_cast<std::int8_t>(band_of(attrs.income_dkk, scheme.income_edges));
  index_of(scheme.ev_options, attrs.has_ev, "ev");
  index_of(scheme.hp_options, attrs.has_hp, "hp");
  code.ev = attrs.has_ev;
  code.hp = attrs.has_hp;
  return code;
}

std::vector<CategoryCode> enumerate_codes(const CategoryScheme& scheme) {
  scheme.validate();
  std::vector<CategoryCode> codes;
  for (Dwelling dw : scheme.dwellings) {
    for (int occ = 0; occ < scheme.occupancy_bands(); ++occ) {
      for (int area = 0; area < scheme.area_bands(); ++area) {
        for (int income = 0; income < scheme.income_bands(); ++income) {
          for (bool ev : scheme.ev_options) {
            for (bool hp : scheme.hp_options) {
              if (scheme.exclude_ev_and_hp && ev && hp) continue;
              codes.push_back(CategoryCode{dw, static_cast<std::int8_t>(occ),
                                           static_cast<std::int8_t>(area),
                                           static_cast<std::int8_t>(income), ev,
                                           hp});
            }
          }
        }
      }
    }
  }
  return codes;
}

std::int64_t CategoryTable::total_households() const {
  std::int64_t total = static_cast<std::int64_t>(excluded.size()) +
                       static_cast<std::int64_t>(suppressed.size());
  for (const auto& [code, entry] : categories) total += entry.count();
  return total;
}

CategoryTable build_category_table(std::span<const HouseholdAttributes> attrs,
                                   const CategoryScheme& scheme) {
  scheme.validate();
  CategoryTable table;
  std::unordered_set<std::string_view> seen;
  seen.reserve(attrs.size());

  struct ShareCounters {
    std::int64_t rural_known = 0, rural_yes = 0;
    std::map<int, std::int64_t> occupants;
    std::int64_t children_known = 0;
    std::map<int, std::int64_t> children;
  };
  std::map<CategoryCode, ShareCounters> counters;

  for (const HouseholdAttributes& a : attrs) {
    if (!seen.insert(a.meter_id).second) {
      throw DomainError("build_category_table: duplicate meter_id '" +
                        a.meter_id + "'");
    }
    auto code = assign_category(a, scheme);
    if (!code.has_value()) {
      table.excluded.push_back(a.meter_id);
      continue;
    }
    table.categories[*code].members.push_back(a.meter_id);
    ShareCounters& c = counters[*code];
    ++c.occupants[a.occupants];
    if (a.rural.has_value()) {
      ++c.rural_known;
      if (*a.rural) ++c.rural_yes;
    }
    if (a.children.has_value()) {
      ++c.children_known;
      ++c.children[std::min(*a.children, 3)];
    }
  }

  for (auto& [code, entry] : table.categories) {
    const ShareCounters& c = counters[code];
    double n = static_cast<double>(entry.count());
    for (const auto& [occ, cnt] : c.occupants) {
      entry.occupancy_split[occ] = static_cast<double>(cnt) / n;
    }
    if (c.rural_known > 0) {
      entry.rural_share =
          static_cast<double>(c.rural_yes) / static_cast<double>(c.rural_known);
    }
    if (c.children_known > 0) {
      for (const auto& [kids, cnt] : c.children) {
        entry.children_split[kids] =
            static_cast<double>(cnt) / static_cast<double>(c.children_known);
      }
    }
  }
  return table;
}

CategoryTable apply_privacy_filter(const CategoryTable& table, int k) {
  if (k < 1) throw DomainError("apply_privacy_filter: k must be >= 1");
  CategoryTable out;
  out.excluded = table.excluded;
  out.suppressed = table.suppressed;
  for (const auto& [code, entry] : table.categories) {
    if (entry.count() < k) {
      out.suppressed.insert(out.suppressed.end(), entry.members.begin(),
                            entry.members.end());
    } else {
      out.categories.emplace(code, entry);
    }
  }
  return out;
}

std::string category_table_json(const CategoryTable& table,
                                const CategoryScheme& scheme) {
  nlohmann::ordered_json codes = nlohmann::ordered_json::object();
  for (const auto& [code, entry] : table.categories) {
    nlohmann::ordered_json e;
    e["count"] = entry.count();
    if (entry.rural_share.has_value()) e["rural_share"] = *entry.rural_share;
    if (!entry.occupancy_split.empty()) {
      nlohmann::ordered_json split = nlohmann::ordered_json::object();
      for (const auto& [occ, share] : entry.occupancy_split) {
        split[std::to_string(occ)] = share;
      }
      e["occupancy_split"] = split;
    }
    if (!entry.children_split.empty()) {
      nlohmann::ordered_json split = nlohmann::ordered_json::object();
      for (const auto& [kids, share] : entry.children_split) {
        split[kids == 3 ? "3+" : std::to_string(kids)] = share;
      }
      e["children_split"] = split;
    }
    codes[format_code(code, scheme)] = e;
  }
  nlohmann::ordered_json j;
  j["categories"] = codes;
  j["excluded"] = table.excluded.size();
  j["suppressed"] = table.suppressed.size();
  j["total_households"] = table.total_households();
  return j.dump(2) + "\n";
}

std::vector<HouseholdAttributes> parse_attributes(std::istream& in) {
  csv::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) {
    throw FormatError("attributes", 1, "missing header line");
  }
  auto header = csv::split(line);
  const std::vector<std::string_view> required = {
      "meter_id", "dwelling", "occupants", "area_sqm", "income_dkk", "ev", "hp"};
  bool ok = header.size() >= required.size() &&
            header.size() <= required.size() + 2;
  if (ok) {
    for (std::size_t i = 0; i < required.size(); ++i) {
      if (header[i] != required[i]) ok = false;
    }
    if (header.size() >= 8 && header[7] != "rural") ok = false;
    if (header.size() == 9 && header[8] != "children") ok = false;
  }
  if (!ok) {
    throw FormatError("attributes", 1, "bad header: '" + line + "'");
  }
  bool has_rural = header.size() >= 8;
  bool has_children = header.size() == 9;

  std::vector<HouseholdAttributes> out;
  while (reader.next(line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw FormatError("attributes", reader.line_no(),
                        "expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    HouseholdAttributes a;
    a.meter_id = std::string(fields[0]);
    if (a.meter_id.empty()) {
      throw FormatError("attributes", reader.line_no(), "empty meter_id");
    }
    if (fields[1] == "AP") {
      a.dwelling = Dwelling::Apartment;
    } else if (fields[1] == "H") {
      a.dwelling = Dwelling::House;
    } else {
      throw FormatError("attributes", reader.line_no(),
                        "dwelling must be AP or H");
    }
    auto occ = csv::parse_int(fields[2]);
    if (!occ.has_value() || *occ < 1) {
      throw FormatError("attributes", reader.line_no(),
                        "occupants must be an integer >= 1");
    }
    a.occupants = static_cast<int>(*occ);
    auto area = csv::parse_double(fields[3]);
    if (!area.has_value() || !(*area > 0.0)) {
      throw FormatError("attributes", reader.line_no(),
                        "area_sqm must be a positive number");
    }
    a.area_sqm = *area;
    auto income = csv::parse_double(fields[4]);
    if (!income.has_value() || *income < 0.0) {
      throw FormatError("attributes", reader.line_no(),
                        "income_dkk must be a non-negative number");
    }
    a.income_dkk = *income;
    auto flag = [&](std::string_view f, const char* what) -> bool {
      if (f == "0") return false;
      if (f == "1") return true;
      throw FormatError("attributes", reader.line_no(),
                        std::string(what) + " must be 0 or 1");
    };
    a.has_ev = flag(fields[5], "ev");
    a.has_hp = flag(fields[6], "hp");
    if (has_rural && !fields[7].empty()) {
      a.rural = flag(fields[7], "rural");
    }
    if (has_children && !fields[8].empty()) {
      auto kids = csv::parse_int(fields[8]);
      if (!kids.has_value() || *kids < 0) {
        throw FormatError("attributes", reader.line_no(),
                          "children must be an integer >= 0");
      }
      a.children = static_cast<int>(*kids);
    }
    out.push_back(std::move(a));
  }
  return out;
}

void write_attributes_csv(std::ostream& out,
                          std::span<const HouseholdAttributes> attrs) {
  out << "meter_id,dwelling,occupants,area_sqm,income_dkk,ev,hp,rural,children\n";
  char buf[64];
  for (const HouseholdAttributes& a : attrs) {
    out << a.meter_id << ','
        << (a.dwelling == Dwelling::Apartment ? "AP" : "H") << ','
        << a.occupants << ',';
    std::snprintf(buf, sizeof(buf), "%.1f", a.area_sqm);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.0f", a.income_dkk);
    out << buf << ',' << (a.has_ev ? 1 : 0) << ',' << (a.has_hp ? 1 : 0) << ',';
    if (a.rural.has_value()) out << (*a.rural ? 1 : 0);
    out << ',';
    if (a.children.has_value()) out << *a.children;
    out << '\n';
  }
}

}  // namespace loadlens
