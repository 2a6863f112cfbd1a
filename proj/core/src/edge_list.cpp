#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "peerlab/error.hpp"
#include "peerlab/netcore.hpp"

namespace peerlab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_n = false;
  std::size_t n = 0;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!have_n) {
      if (t.rfind("n=", 0) != 0)
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'n=<count>'");
      const std::string num = t.substr(2);
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
      if (ec != std::errc() || ptr != num.data() + num.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad node count");
      have_n = true;
      continue;
    }
    std::istringstream fields(t);
    long long i = -1;
    long long j = -1;
    double w = 0.0;
    std::string extra;
    if (!(fields >> i >> j >> w) || (fields >> extra) || i < 0 || j < 0)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'i j w'");
    edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
  }
  if (!have_n) throw ParseError("missing header 'n=<count>'");
  try {
    return Graph::from_edges(n, edges);
  } catch (const InvalidGraph& e) {
    throw ParseError(e.what());
  }
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "n=" << graph.size() << '\n';
  const auto old = out.precision(17);
  for (const Edge& e : graph.edges()) out << e.i << ' ' << e.j << ' ' << e.weight << '\n';
  out.precision(old);
}

void write_edge_list_file(const std::string& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_edge_list(out, graph);
}

}  // namespace peerlab
