#include "lgt/serialize.hpp"

#include "lgt/errors.hpp"

namespace lgt {

nlohmann::json form_to_json(const DifferentialForm &f)
{
	nlohmann::json cells = nlohmann::json::array();
	const BoxLattice &box = f.box();
	for (std::size_t i = 0; i < f.codes().size(); ++i)
	{
		if (!f.codes()[i])
			continue;
		Cell c = box.cell(f.degree(), i);
		std::vector<int> base(c.base.begin(), c.base.begin() + box.dim());
		cells.push_back({{"base", base}, {"dirs", directions(c)}, {"value", f.group().residues(f.at(i))}});
	}
	return {{"degree", f.degree()}, {"cells", cells}};
}

DifferentialForm form_from_json(const nlohmann::json &j, const BoxLattice &box, const GroupSpec &G)
{
	try
	{
		int k = j.at("degree").get<int>();
		DifferentialForm f(box, G, k);
		for (const auto &c : j.at("cells"))
		{
			auto base = c.at("base").get<std::vector<int>>();
			auto dirs = c.at("dirs").get<std::vector<int>>();
			if (static_cast<int>(base.size()) != box.dim() || static_cast<int>(dirs.size()) != k)
				throw DomainError("serialized cell does not match the box or degree");
			Cell cell{};
			for (int i = 0; i < box.dim(); ++i)
				cell.base[i] = base[i];
			for (int d : dirs)
			{
				if (d < 0 || d >= box.dim())
					throw DomainError("serialized cell direction out of range");
				cell.dirs |= static_cast<std::uint8_t>(1u << d);
			}
			cell.sign = 1;
			f.set(cell, G.element(c.at("value").get<std::vector<int>>()));
		}
		return f;
	}
	catch (const nlohmann::json::exception &e)
	{
		throw DomainError(std::string("malformed serialized form: ") + e.what());
	}
}

} // namespace lgt
