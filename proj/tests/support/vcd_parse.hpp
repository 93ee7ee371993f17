#pragma once

// Independent VCD reader for tests: checks the header structure and replays
// value changes into per-timestamp snapshots.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcdtest {

struct Var {
  std::string name;
  unsigned width;
  std::string code;
};

struct Parsed {
  std::string date;
  std::string timescale;
  std::string scope;
  std::vector<Var> vars;
  // time -> full snapshot of every variable, by variable index
  std::map<std::uint64_t, std::vector<std::uint64_t>> snapshots;
  std::size_t change_records = 0;
};

inline Parsed parse(const std::string& text) {
  Parsed p;
  std::istringstream in(text);
  std::string tok;
  std::map<std::string, std::size_t> by_code;
  auto expect = [&](const std::string& want) {
    if (!(in >> tok) || tok != want) throw std::runtime_error("expected " + want + ", got " + tok);
  };
  auto read_until_end = [&]() {
    std::string body, w;
    while (in >> w && w != "$end") body += (body.empty() ? "" : " ") + w;
    return body;
  };

  bool defs_done = false;
  while (!defs_done && in >> tok) {
    if (tok == "$date") p.date = read_until_end();
    else if (tok == "$version") read_until_end();
    else if (tok == "$timescale") p.timescale = read_until_end();
    else if (tok == "$scope") {
      expect("module");
      in >> p.scope;
      expect("$end");
    } else if (tok == "$var") {
      Var v;
      std::string kind;
      in >> kind >> v.width >> v.code >> v.name;
      if (kind != "wire") throw std::runtime_error("unexpected var kind " + kind);
      expect("$end");
      if (by_code.count(v.code)) throw std::runtime_error("duplicate code " + v.code);
      by_code[v.code] = p.vars.size();
      p.vars.push_back(v);
    } else if (tok == "$upscope") {
      expect("$end");
    } else if (tok == "$enddefinitions") {
      expect("$end");
      defs_done = true;
    } else {
      throw std::runtime_error("unexpected header token " + tok);
    }
  }
  if (!defs_done) throw std::runtime_error("missing $enddefinitions");

  std::vector<std::uint64_t> current(p.vars.size(), 0);
  std::vector<bool> seen(p.vars.size(), false);
  bool have_time = false;
  std::uint64_t time = 0;
  auto flush = [&]() {
    if (have_time) p.snapshots[time] = current;
  };
  while (in >> tok) {
    if (tok == "$dumpvars" || tok == "$end") continue;
    if (tok[0] == '#') {
      const std::uint64_t t = std::stoull(tok.substr(1));
      if (have_time && t <= time) throw std::runtime_error("time not increasing");
      flush();
      time = t;
      have_time = true;
      continue;
    }
    std::uint64_t value = 0;
    std::string code;
    if (tok[0] == 'b') {
      const std::string bits = tok.substr(1);
      if (bits.size() > 1 && bits[0] == '0') throw std::runtime_error("leading zero in " + tok);
      value = std::stoull(bits, nullptr, 2);
      in >> code;
    } else if (tok[0] == '0' || tok[0] == '1') {
      value = static_cast<std::uint64_t>(tok[0] - '0');
      code = tok.substr(1);
    } else {
      throw std::runtime_error("bad value token " + tok);
    }
    const auto it = by_code.find(code);
    if (it == by_code.end()) throw std::runtime_error("unknown code " + code);
    const bool scalar = p.vars[it->second].width == 1;
    if (scalar == (tok[0] == 'b')) throw std::runtime_error("scalar/vector form mismatch for " + code);
    if (seen[it->second] && current[it->second] == value && p.snapshots.size() > 0) {
      throw std::runtime_error("change record without a change for " + code);
    }
    seen[it->second] = true;
    current[it->second] = value;
    ++p.change_records;
  }
  flush();
  return p;
}

}  // namespace vcdtest
