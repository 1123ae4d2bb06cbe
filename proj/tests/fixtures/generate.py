#!/usr/bin/env python3
"""Regenerates the committed test fixtures. Output is fully determined by SEED."""

import json
import random
from pathlib import Path

SEED = 20240917
HERE = Path(__file__).resolve().parent

LANGS = ["c", "java", "python", "cpp", "go", "javascript", "php", "ruby", "csharp"]
TYPES = ["Refactoring", "Bugfix", "Testing", "Logging", "Documentation", "Other"]
NATURES = ["Prescriptive", "Descriptive", "Clarification", "Other"]

# Samples the judge scores below the default relevance threshold of 4.
IRRELEVANT = ["000013", "000027", "000041", "000058", "000072", "000096",
              "000115", "000131", "000150", "000174", "000188"]
# Samples without a pre-change file, and without a refinement target.
NO_OLD_FILE = {"000019", "000064", "000133"}
NO_TARGET = {"000064", "000102", "000177"}

LIST_DELETE_ORIGINAL = ("you need to use `list_delete` here, `list_free` doesn't do shit... "
                        "(honestly `list_free` shouldn't be in the API to begin with)")
LIST_DELETE_REFORMULATED = (
    "Consider using `list_delete` instead of `list_free` to properly clean up the `nh_list` in "
    "`ospf6_route_delete`. The `list_free` function does not handle the deletion of the list's "
    "elements, which is necessary in this case.")

SNIPPETS = {
    "c": [("int n = count_items(list);", "size_t n = count_items(list);"),
          ("free(buf);", "free(buf);\n    buf = NULL;"),
          ("if (len > 0) copy(dst, src, len);", "if (len > 0 && dst) copy(dst, src, len);"),
          ("return -1;", "return ERR_INVALID;")],
    "java": [("List<String> out = new ArrayList<>();", "List<String> out = new ArrayList<>(items.size());"),
             ("log.info(\"done\");", "log.debug(\"done: {}\", id);"),
             ("if (value == null) return;", "Objects.requireNonNull(value);")],
    "python": [("result = []", "result: list[str] = []"),
               ("print(value)", "logger.info(\"value=%s\", value)"),
               ("except Exception:", "except KeyError:")],
    "cpp": [("std::vector<int> v;", "std::vector<int> v;\n    v.reserve(n);"),
            ("auto p = new Node();", "auto p = std::make_unique<Node>();")],
    "go": [("if err != nil { return err }", "if err != nil { return fmt.Errorf(\"load: %w\", err) }"),
           ("x := make([]int, 0)", "x := make([]int, 0, n)")],
    "javascript": [("var total = 0;", "let total = 0;"),
                   ("if (a == b) {", "if (a === b) {")],
    "php": [("$rows = array();", "$rows = [];"),
            ("echo $name;", "echo htmlspecialchars($name);")],
    "ruby": [("items.each do |i|", "items.each_with_index do |i, idx|"),
             ("puts value", "logger.info(value)")],
    "csharp": [("var list = new List<int>();", "var list = new List<int>(capacity);"),
               ("catch (Exception e)", "catch (IOException e)")],
}

COMMENT_TEMPLATES = [
    "Why is `{sym}` needed here? It looks unused after this change.",
    "Please add a test covering the empty case for `{sym}`.",
    "This should probably log at debug level instead of info.",
    "nit: rename `{sym}` to something more descriptive.",
    "this is wrong, `{sym}` can be null here and you just crash",
    "Can we document what `{sym}` returns on failure?",
    "Consider extracting this block into a helper; it duplicates `{sym}`.",
    "Off-by-one: the loop should stop before `{sym}`.",
]
SYMBOLS = ["buf", "count", "handler", "result", "config", "index", "node", "parser", "cache", "token"]


def hunk(context_before, old, new, context_after, start=10):
    old_lines = old.split("\n")
    new_lines = new.split("\n")
    body = [" " + context_before] + ["-" + l for l in old_lines] + ["+" + l for l in new_lines] + [" " + context_after]
    old_count = 2 + len(old_lines)
    new_count = 2 + len(new_lines)
    return f"@@ -{start},{old_count} +{start},{new_count} @@\n" + "\n".join(body) + "\n"


def sample_id(i):
    return f"{i:06d}"


def make_sample(rng, i):
    sid = sample_id(i)
    if i == 0:
        lang = "c"
        old, new = ("list_free(route->nh_list);", "list_free(route->nh_list);\n    route->nh_list = NULL;")
        diff = hunk("void ospf6_route_delete(struct ospf6_route *route) {", old, new, "}", start=120)
        target = hunk("void ospf6_route_delete(struct ospf6_route *route) {", old,
                      "list_delete(&route->nh_list);", "}", start=120)
        old_file = ("void ospf6_route_delete(struct ospf6_route *route) {\n"
                    "    list_free(route->nh_list);\n}\n")
        comment = LIST_DELETE_ORIGINAL
    else:
        lang = LANGS[rng.randrange(len(LANGS))]
        old, new = SNIPPETS[lang][rng.randrange(len(SNIPPETS[lang]))]
        start = rng.randrange(1, 400)
        diff = hunk("    // begin", "    " + old, "    " + new.replace("\n", "\n    ") if "\n" in new else "    " + new,
                    "    // end", start=start)
        target = hunk("    // begin", "    " + old, "    " + new.split("\n")[0] + "  // revised", "    // end",
                      start=start)
        old_file = f"// {lang} source for sample {sid}\n    // begin\n    {old}\n    // end\n"
        sym = SYMBOLS[rng.randrange(len(SYMBOLS))]
        comment = COMMENT_TEMPLATES[rng.randrange(len(COMMENT_TEMPLATES))].format(sym=sym)
    record = {"id": sid, "lang": lang, "patch": diff, "comment": comment,
              "meta": {"repo": f"org/project-{i % 17}", "source": "fixture"}}
    if sid not in NO_OLD_FILE:
        record["old"] = old_file
    if sid not in NO_TARGET:
        record["target"] = target
    return record


def pick_set(rng, names, max_size=2):
    k = 1 if rng.random() < 0.7 else min(max_size, len(names))
    chosen = set(rng.sample(names, k))
    return [n for n in names if n in chosen]


def judgment_block(fields):
    lines = ["```judgment"]
    for key, value in fields:
        lines.append(f"{key}: {value}")
    lines.append("```")
    return "\n".join(lines) + "\n"


def evaluation_reply(rng, record):
    sid = record["id"]
    uncivil = sid == "000000" or "crash" in record["comment"]
    if sid in IRRELEVANT:
        relevance = rng.randint(1, 3)
    elif sid == "000000":
        relevance = 9
    else:
        relevance = rng.randint(4, 10)
    types = ["Bugfix"] if sid == "000000" else pick_set(rng, TYPES)
    natures = ["Prescriptive"] if sid == "000000" else pick_set(rng, NATURES)
    clarity = rng.randint(3, 9)
    conciseness = rng.randint(3, 9)
    labels = {"type": types, "nature": natures, "civility": "Uncivil" if uncivil else "Civil",
              "relevance": relevance, "clarity": clarity, "conciseness": conciseness}
    block = judgment_block([
        ("REFERENCE_COMMENT", f"Reference review for sample {sid}: check the changed line."),
        ("TYPE", ", ".join(types)),
        ("NATURE", ", ".join(natures)),
        ("CIVILITY", labels["civility"]),
        ("RELEVANCE", relevance),
        ("CLARITY", clarity),
        ("CONCISENESS", conciseness),
        ("RATIONALE", f"Scores follow from how directly the comment addresses the change in {sid}."),
    ])
    return "Here is my assessment of the review comment.\n\n" + block, labels


def reformulation_text(record):
    if record["id"] == "000000":
        return LIST_DELETE_REFORMULATED
    c = record["comment"].rstrip(".?!")
    c = c.replace("this is wrong, ", "").replace("nit: ", "")
    return "Consider the following: " + c[0].lower() + c[1:] + "."


def reformulation_reply(record):
    return ("Sure, here is the reformulated comment.\n\n```reformulated\n"
            + reformulation_text(record) + "\n```\n")


def reevaluation_reply(rng, labels):
    clarity = min(10, labels["clarity"] + rng.randint(0, 2))
    conciseness = min(10, labels["conciseness"] + rng.randint(-1, 2))
    conciseness = max(1, conciseness)
    natures = ["Prescriptive"] if rng.random() < 0.8 else labels["nature"]
    block = judgment_block([
        ("NATURE", ", ".join(natures)),
        ("CIVILITY", "Civil"),
        ("CLARITY", clarity),
        ("CONCISENESS", conciseness),
        ("RATIONALE", "The rewrite is specific and polite."),
    ])
    return "Assessment of the reformulated comment:\n\n" + block


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records),
                    encoding="utf-8")


def main():
    rng = random.Random(SEED)
    records = [make_sample(rng, i) for i in range(200)]
    write_jsonl(HERE / "corpus_200.jsonl", records)

    # Import fixture: 193 valid records interleaved with 7 malformed ones.
    malformed = [
        (20, '{"id": "bad-json", "lang": "c", "patch": '),
        (45, json.dumps({"id": "no-comment", "lang": "c", "patch": records[1]["patch"]})),
        (70, json.dumps({"id": "empty-comment", "lang": "c", "patch": records[1]["patch"], "comment": "  "})),
        (95, json.dumps({"id": "no-diff", "lang": "go", "comment": "why?"})),
        (120, json.dumps({"id": "bad-lang", "lang": "cobol", "patch": records[1]["patch"], "comment": "why?"})),
        (150, json.dumps({"id": "bad-hunk", "lang": "c", "patch": "@@ -1,5 +1,1 @@\n-a\n+b\n", "comment": "x"})),
        (180, json.dumps({"id": "000003", "lang": "c", "patch": records[1]["patch"], "comment": "dup"})),
    ]
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in records[:193]]
    for pos, text in malformed:
        lines.insert(pos, text)
    (HERE / "import_200_raw.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    mock = HERE / "mock"
    mock.mkdir(exist_ok=True)
    for f in mock.glob("*.txt"):
        f.unlink()
    for r in records:
        reply, labels = evaluation_reply(rng, r)
        (mock / f"{r['id']}.evaluation.txt").write_text(reply, encoding="utf-8")
        if r["id"] in IRRELEVANT:
            continue
        (mock / f"{r['id']}.reformulation.txt").write_text(reformulation_reply(r), encoding="utf-8")
        (mock / f"{r['id']}.reevaluation.txt").write_text(reevaluation_reply(rng, labels), encoding="utf-8")
    (HERE / "irrelevant_ids.txt").write_text("\n".join(IRRELEVANT) + "\n", encoding="utf-8")

    write_annotation_fixture(rng, records)
    write_em_fixture()


def write_annotation_fixture(rng, records):
    """Ten samples, two annotators, three disagreements (one per listed dimension)."""
    ann = HERE / "annotation"
    ann.mkdir(exist_ok=True)
    subset = records[:10]
    write_jsonl(ann / "samples.jsonl", subset)
    base = []
    for r in subset:
        base.append({"type": pick_set(rng, TYPES), "nature": pick_set(rng, NATURES),
                     "civility": "Uncivil" if r["id"] == "000000" else "Civil",
                     "relevance": rng.randint(4, 10), "clarity": rng.randint(3, 10),
                     "conciseness": rng.randint(3, 10)})
    a = [{"sample_id": r["id"], "annotator_id": "A", "labels": l} for r, l in zip(subset, base)]
    b = [json.loads(json.dumps(x)) for x in a]
    for x in b:
        x["annotator_id"] = "B"
    b[2]["labels"]["civility"] = "Uncivil" if b[2]["labels"]["civility"] == "Civil" else "Civil"
    b[5]["labels"]["clarity"] = b[5]["labels"]["clarity"] % 10 + 1
    b[8]["labels"]["type"] = ["Testing"] if b[8]["labels"]["type"] != ["Testing"] else ["Logging"]
    write_jsonl(ann / "annotations_A.jsonl", a)
    write_jsonl(ann / "annotations_B.jsonl", b)
    resolutions = [
        {"sample_id": "000002", "dimension": "civility", "pick": "B", "note": "tone reads as dismissive"},
        {"sample_id": "000005", "dimension": "clarity", "value": 7, "note": "settled between both scores"},
        {"sample_id": "000008", "dimension": "type", "pick": "A", "note": "primary concern"},
    ]
    write_jsonl(ann / "resolutions.jsonl", resolutions)
    conflicts = [["000002", "civility"], ["000005", "clarity"], ["000008", "type"]]
    (ann / "expected_conflicts.json").write_text(json.dumps(conflicts) + "\n", encoding="utf-8")


def write_em_fixture():
    """20 candidate/reference pairs: 5 identical, 2 equal after newline and trailing
    whitespace normalization, 13 different. Normalized EM = 7, raw EM = 5."""
    em = HERE / "em"
    em.mkdir(exist_ok=True)
    cands, refs = [], []
    for i in range(20):
        ref = f"int f{i}(int x) {{\n    return x + {i};\n}}"
        if i < 5:
            cand = ref
        elif i == 5:
            cand = ref.replace("\n", "\r\n")
        elif i == 6:
            cand = ref.replace("\n", "   \n") + "\t"
        else:
            cand = ref.replace(f"x + {i}", f"x - {i}")
        cands.append({"id": f"p{i:02d}", "text": cand})
        refs.append({"id": f"p{i:02d}", "text": ref})
    write_jsonl(em / "cand.jsonl", cands)
    write_jsonl(em / "ref.jsonl", refs)


if __name__ == "__main__":
    main()
