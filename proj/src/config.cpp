#include "fspec/config.hpp"

#include "fspec/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fspec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ConfigError((where.empty() ? std::string("measure") : where) + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!obj.is_object())
        fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }))
            fail(where, "unknown field '" + item.key() + "'");
    }
}

const json& field(const json& obj, const char* key, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        fail(where, std::string("missing field '") + key + "'");
    return *it;
}

std::string sub(const std::string& where, const std::string& key)
{
    return where.empty() ? key : where + "." + key;
}

double number(const json& v, const std::string& where)
{
    if (!v.is_number())
        fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        fail(where, "must be finite");
    return x;
}

std::vector<double> numbers(const json& v, const std::string& where)
{
    if (!v.is_array())
        fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

MeasureSpec parse_node(const json& doc, const std::string& where, bool top)
{
    if (top)
        allow_keys(doc, where, {"schema_version", "d", "kind", "params", "mass", "children"});
    else
        allow_keys(doc, where, {"d", "kind", "params", "mass", "children"});
    if (top) {
        const json& v = field(doc, "schema_version", where);
        if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
            fail(sub(where, "schema_version"), "unsupported schema version (expected " +
                                                   std::to_string(kSchemaVersion) + ")");
    }
    const json& dj = field(doc, "d", where);
    if (!dj.is_number_integer())
        fail(sub(where, "d"), "expected an integer");
    const int d = dj.get<int>();
    const json& kj = field(doc, "kind", where);
    if (!kj.is_string())
        fail(sub(where, "kind"), "expected a string");
    const auto kind = measure_kind_from_string(kj.get<std::string>());
    if (!kind)
        fail(sub(where, "kind"), "unknown kind '" + kj.get<std::string>() + "'");

    const json empty = json::object();
    const auto pit = doc.find("params");
    const json& params = pit == doc.end() ? empty : *pit;
    const std::string pw = sub(where, "params");

    std::vector<MeasureSpec> children;
    if (const auto cit = doc.find("children"); cit != doc.end()) {
        if (!cit->is_array())
            fail(sub(where, "children"), "expected an array");
        for (std::size_t i = 0; i < cit->size(); ++i)
            children.push_back(parse_node((*cit)[i], sub(where, "children") + "[" + std::to_string(i) + "]", false));
    }
    const bool base = *kind == MeasureKind::atomic || *kind == MeasureKind::box_lebesgue ||
                      *kind == MeasureKind::self_similar_1d || *kind == MeasureKind::sphere_surface;
    if (base && !children.empty())
        fail(sub(where, "children"), "only combinators take children");
    const auto mit = doc.find("mass");
    const double mass = mit == doc.end() ? 1.0 : number(*mit, sub(where, "mass"));

    try {
        MeasureSpec spec = [&]() -> MeasureSpec {
            switch (*kind) {
            case MeasureKind::atomic: {
                allow_keys(params, pw, {"points", "weights"});
                const json& pts = field(params, "points", pw);
                if (!pts.is_array())
                    fail(sub(pw, "points"), "expected an array of points");
                std::vector<double> flat;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    const auto row = numbers(pts[i], sub(pw, "points") + "[" + std::to_string(i) + "]");
                    if (static_cast<int>(row.size()) != d)
                        fail(sub(pw, "points") + "[" + std::to_string(i) + "]", "expected " + std::to_string(d) +
                                                                                    " coordinates");
                    flat.insert(flat.end(), row.begin(), row.end());
                }
                return MeasureSpec::atomic(d, flat, numbers(field(params, "weights", pw), sub(pw, "weights")), mass);
            }
            case MeasureKind::box_lebesgue:
                allow_keys(params, pw, {"lower", "upper"});
                return MeasureSpec::box_lebesgue(numbers(field(params, "lower", pw), sub(pw, "lower")),
                                                 numbers(field(params, "upper", pw), sub(pw, "upper")), mass);
            case MeasureKind::self_similar_1d:
                allow_keys(params, pw, {"ratio", "digits", "weights"});
                return MeasureSpec::self_similar(number(field(params, "ratio", pw), sub(pw, "ratio")),
                                                 numbers(field(params, "digits", pw), sub(pw, "digits")),
                                                 numbers(field(params, "weights", pw), sub(pw, "weights")), mass);
            case MeasureKind::sphere_surface:
                allow_keys(params, pw, {"center", "radius"});
                return MeasureSpec::sphere_surface(numbers(field(params, "center", pw), sub(pw, "center")),
                                                   number(field(params, "radius", pw), sub(pw, "radius")), mass);
            case MeasureKind::convolution:
                allow_keys(params, pw, {});
                return MeasureSpec::convolve(children);
            case MeasureKind::product:
                allow_keys(params, pw, {});
                return MeasureSpec::product(children);
            case MeasureKind::affine:
                allow_keys(params, pw, {"scale", "shift"});
                if (children.size() != 1)
                    fail(sub(where, "children"), "affine takes exactly one child");
                return MeasureSpec::affine(children.front(), number(field(params, "scale", pw), sub(pw, "scale")),
                                           numbers(field(params, "shift", pw), sub(pw, "shift")));
            }
            fail(where, "unhandled kind");
        }();
        if (spec.dim() != d)
            fail(sub(where, "d"), "declared dimension " + std::to_string(d) + " does not match the derived " +
                                      std::to_string(spec.dim()));
        if (!base && mit != doc.end() && std::abs(spec.mass() - mass) > 1e-12 * spec.mass())
            fail(sub(where, "mass"), "combinator mass is derived from the children and must equal " +
                                         std::to_string(spec.mass()));
        return spec;
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.find(": ") != std::string::npos && msg.rfind(where.empty() ? "measure" : where, 0) == 0)
            throw;
        fail(where, msg);
    }
}

json array_of(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(x);
    return a;
}

json node_to_json(const MeasureSpec& spec, bool top)
{
    json j = json::object();
    if (top)
        j["schema_version"] = kSchemaVersion;
    j["d"] = spec.dim();
    j["kind"] = std::string(to_string(spec.kind()));
    j["mass"] = spec.mass();
    json params = json::object();
    switch (spec.kind()) {
    case MeasureKind::atomic: {
        const auto& p = spec.params_as<AtomicParams>();
        json pts = json::array();
        const auto d = static_cast<std::size_t>(spec.dim());
        for (std::size_t i = 0; i < p.weights.size(); ++i)
            pts.push_back(array_of({p.points.begin() + static_cast<std::ptrdiff_t>(i * d),
                                    p.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * d)}));
        params["points"] = pts;
        params["weights"] = array_of(p.weights);
        break;
    }
    case MeasureKind::box_lebesgue: {
        const auto& p = spec.params_as<BoxParams>();
        params["lower"] = array_of(p.lower);
        params["upper"] = array_of(p.upper);
        break;
    }
    case MeasureKind::self_similar_1d: {
        const auto& p = spec.params_as<SelfSimilarParams>();
        params["ratio"] = p.ratio;
        params["digits"] = array_of(p.digits);
        params["weights"] = array_of(p.weights);
        break;
    }
    case MeasureKind::sphere_surface: {
        const auto& p = spec.params_as<SphereParams>();
        params["center"] = array_of(p.center);
        params["radius"] = p.radius;
        break;
    }
    case MeasureKind::affine: {
        const auto& p = spec.params_as<AffineParams>();
        params["scale"] = p.scale;
        params["shift"] = array_of(p.shift);
        break;
    }
    case MeasureKind::convolution:
    case MeasureKind::product:
        break;
    }
    j["params"] = params;
    if (!spec.children().empty()) {
        json ch = json::array();
        for (const auto& c : spec.children())
            ch.push_back(node_to_json(c, false));
        j["children"] = ch;
    }
    return j;
}

json parse_json(std::string_view text, const char* what)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": malformed JSON: " + e.what());
    }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

MeasureSpec parse_measure(std::string_view text)
{
    return parse_node(parse_json(text, "measure"), "", true);
}

MeasureSpec load_measure(const std::filesystem::path& path)
{
    try {
        return parse_measure(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string canonical_measure(const MeasureSpec& spec)
{
    return node_to_json(spec, true).dump();
}

std::string pretty_measure(const MeasureSpec& spec)
{
    return node_to_json(spec, true).dump(2) + "\n";
}

std::string fingerprint(const MeasureSpec& spec)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_measure(spec))));
    return buf;
}

bool ZooMember::has_tag(std::string_view tag) const
{
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::vector<ZooMember> parse_zoo(std::string_view text)
{
    const json doc = parse_json(text, "zoo");
    allow_keys(doc, "zoo", {"schema_version", "members"});
    const json& v = field(doc, "schema_version", "zoo");
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
        fail("zoo.schema_version", "unsupported schema version");
    const json& members = field(doc, "members", "zoo");
    if (!members.is_array() || members.empty())
        fail("zoo.members", "expected a nonempty array");
    std::vector<ZooMember> zoo;
    std::set<std::string> names;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const std::string where = "zoo.members[" + std::to_string(i) + "]";
        const json& m = members[i];
        allow_keys(m, where, {"name", "tags", "measure"});
        const json& name = field(m, "name", where);
        if (!name.is_string() || name.get<std::string>().empty())
            fail(where + ".name", "expected a nonempty string");
        if (!names.insert(name.get<std::string>()).second)
            fail(where + ".name", "duplicate member name '" + name.get<std::string>() + "'");
        std::vector<std::string> tags;
        if (const auto t = m.find("tags"); t != m.end()) {
            if (!t->is_array())
                fail(where + ".tags", "expected an array of strings");
            for (const auto& x : *t) {
                if (!x.is_string())
                    fail(where + ".tags", "expected an array of strings");
                tags.push_back(x.get<std::string>());
            }
        }
        json measure = field(m, "measure", where);
        if (measure.is_object() && !measure.contains("schema_version"))
            measure["schema_version"] = kSchemaVersion;
        zoo.push_back({name.get<std::string>(), std::move(tags), parse_node(measure, where + ".measure", true)});
    }
    return zoo;
}

std::vector<ZooMember> load_zoo(const std::filesystem::path& path)
{
    try {
        return parse_zoo(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string zoo_to_text(const std::vector<ZooMember>& zoo)
{
    json members = json::array();
    for (const auto& m : zoo) {
        json j = json::object();
        j["name"] = m.name;
        j["tags"] = m.tags;
        json measure = node_to_json(m.spec, false);
        j["measure"] = measure;
        members.push_back(j);
    }
    json doc = json::object();
    doc["schema_version"] = kSchemaVersion;
    doc["members"] = members;
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace fspec
