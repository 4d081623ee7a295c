#include "relight/checkpoint.hpp"

#include "relight/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

namespace relight::nn {

namespace {

constexpr const char* kMagic = "RELIGHT-CKPT";

void append_f32(std::string& out, double x) {
    const float f = static_cast<float>(x);
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
}

} // namespace

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data) {
    std::string payload;
    std::ostringstream manifest;
    manifest << kMagic << " v" << data.version << '\n';
    manifest << "arch " << data.arch << '\n';
    for (const auto& [k, v] : data.config) manifest << "config " << k << '=' << v << '\n';
    if (data.opt_steps >= 0)
        manifest << "opt " << data.opt_steps << '\n';
    else
        manifest << "opt none\n";
    for (const auto& [name, t] : data.tensors) {
        manifest << "tensor " << name << ' ' << shape_to_string(t.shape) << ' ' << payload.size()
                 << '\n';
        for (double x : t.v) append_f32(payload, x);
    }
    manifest << "payload " << payload.size() << '\n';

    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) throw IoError{"cannot open checkpoint for writing: " + path.string()};
    const std::string head = manifest.str();
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError{"short write to checkpoint: " + path.string()};
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw IoError{"cannot open checkpoint: " + path.string()};

    CheckpointData data;
    std::string line;
    if (!std::getline(in, line)) throw FormatError{"empty checkpoint: " + path.string()};
    {
        std::istringstream is{line};
        std::string magic, ver;
        is >> magic >> ver;
        if (magic != kMagic || ver.size() < 2 || ver[0] != 'v')
            throw FormatError{"not a checkpoint file: " + path.string()};
        try {
            data.version = std::stoi(ver.substr(1));
        } catch (const std::exception&) {
            throw FormatError{"bad checkpoint version line: " + line};
        }
        if (data.version != 1)
            throw FormatError{"unsupported checkpoint version " + std::to_string(data.version)};
    }

    struct Entry {
        std::string name;
        std::vector<int> shape;
        std::size_t offset;
    };
    std::vector<Entry> entries;
    std::size_t payload_bytes = 0;
    bool saw_payload = false;
    while (std::getline(in, line)) {
        std::istringstream is{line};
        std::string tag;
        is >> tag;
        if (tag == "arch") {
            const auto pos = line.find(' ');
            data.arch = pos == std::string::npos ? std::string{} : line.substr(pos + 1);
        } else if (tag == "config") {
            const auto pos = line.find(' ');
            const std::string rest = pos == std::string::npos ? std::string{} : line.substr(pos + 1);
            const auto eq = rest.find('=');
            if (eq == std::string::npos) throw FormatError{"bad config line: " + line};
            data.config.emplace_back(rest.substr(0, eq), rest.substr(eq + 1));
        } else if (tag == "opt") {
            std::string val;
            is >> val;
            if (val == "none")
                data.opt_steps = -1;
            else {
                try {
                    data.opt_steps = std::stoll(val);
                } catch (const std::exception&) {
                    throw FormatError{"bad opt line: " + line};
                }
            }
        } else if (tag == "tensor") {
            Entry e;
            std::string shape_text;
            unsigned long long off = 0;
            if (!(is >> e.name >> shape_text >> off)) throw FormatError{"bad tensor line: " + line};
            e.shape = shape_from_string(shape_text);
            e.offset = static_cast<std::size_t>(off);
            entries.push_back(std::move(e));
        } else if (tag == "payload") {
            unsigned long long n = 0;
            if (!(is >> n)) throw FormatError{"bad payload line: " + line};
            payload_bytes = static_cast<std::size_t>(n);
            saw_payload = true;
            break;
        } else {
            throw FormatError{"unknown manifest line: " + line};
        }
    }
    if (!saw_payload) throw FormatError{"checkpoint manifest missing payload line"};

    std::string payload(payload_bytes, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload_bytes));
    if (static_cast<std::size_t>(in.gcount()) != payload_bytes)
        throw FormatError{"checkpoint payload truncated: " + path.string()};

    for (const Entry& e : entries) {
        const std::size_t n = shape_numel(e.shape);
        if (e.offset + n * 4 > payload_bytes)
            throw FormatError{"tensor '" + e.name + "' extends past payload"};
        Tensor t{e.shape};
        for (std::size_t i = 0; i < n; ++i) {
            float f = 0.0f;
            std::memcpy(&f, payload.data() + e.offset + i * 4, 4);
            t.v[i] = static_cast<double>(f);
        }
        data.tensors.emplace_back(e.name, std::move(t));
    }
    return data;
}

CheckpointData to_checkpoint(NetworkParams& params,
                             const std::map<std::string, std::string>& config_echo,
                             const Adam* opt) {
    params.snap_to_f32();
    CheckpointData data;
    data.arch = params.spec.descriptor();
    data.config.assign(config_echo.begin(), config_echo.end()); // map iterates sorted
    for (const auto& [name, node] : params.tensors) data.tensors.emplace_back(name, node->value);
    if (opt) {
        data.opt_steps = opt->steps();
        for (std::size_t i = 0; i < params.tensors.size(); ++i) {
            const auto& [name, node] = params.tensors[i];
            data.tensors.emplace_back("opt.m." + name,
                                      Tensor{node->value.shape, opt->first_moments()[i]});
            data.tensors.emplace_back("opt.v." + name,
                                      Tensor{node->value.shape, opt->second_moments()[i]});
        }
    }
    return data;
}

NetworkParams params_from_checkpoint(const CheckpointData& data) {
    const NetSpec spec = NetSpec::parse_descriptor(data.arch);
    NetworkParams params = NetworkParams::zeros(spec);
    for (auto& [name, node] : params.tensors) {
        const auto it = std::find_if(data.tensors.begin(), data.tensors.end(),
                                     [&](const auto& e) { return e.first == name; });
        if (it == data.tensors.end())
            throw FormatError{"checkpoint missing tensor '" + name + "'"};
        if (it->second.shape != node->value.shape)
            throw FormatError{"checkpoint tensor '" + name + "' has shape " +
                              shape_to_string(it->second.shape) + ", expected " +
                              shape_to_string(node->value.shape)};
        node->value.v = it->second.v;
    }
    return params;
}

std::optional<Adam> adam_from_checkpoint(const CheckpointData& data, const NetworkParams& params,
                                         AdamConfig cfg) {
    if (data.opt_steps < 0) return std::nullopt;
    std::vector<std::vector<double>> m, v;
    for (const auto& [name, node] : params.tensors) {
        for (const char* prefix : {"opt.m.", "opt.v."}) {
            const std::string key = prefix + name;
            const auto it = std::find_if(data.tensors.begin(), data.tensors.end(),
                                         [&](const auto& e) { return e.first == key; });
            if (it == data.tensors.end())
                throw FormatError{"checkpoint optimizer state missing '" + key + "'"};
            (prefix[4] == 'm' ? m : v).push_back(it->second.v);
        }
    }
    Adam adam{params, cfg};
    adam.restore(data.opt_steps, std::move(m), std::move(v));
    return adam;
}

} // namespace relight::nn
