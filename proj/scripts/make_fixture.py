#!/usr/bin/env python3
"""Generates the bundled fixture corpus and fixture embedding files.

The fixture stands in for the published dataset and the GloVe / GN-GloVe
vector files when those are not available locally. Everything is derived from
a fixed seed, so rerunning this script reproduces the committed files.

Outputs (relative to the repository root):
  data/fixture/statements.csv          ~200 labeled workplace statements (+ duplicates)
  data/fixture/glove.fixture.100d.txt  100-d vectors in GloVe text format
  data/fixture/gn_glove.fixture.100d.txt  same vectors, gender direction removed
  data/fixture/mini20.csv              20-statement subset (10 per class)
  data/fixture/overfit16.csv           16 separable statements for overfit checks

The vectors are synthetic: each word is a category prototype plus noise, so
that words of the same kind (stereotyping adjectives, job titles, office
nouns, ...) are close together the way pretrained vectors place related words.
"""

import csv
import math
import os
import random
import re

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "data", "fixture")
DIM = 100
SEED = 20190715

rng = random.Random(SEED)

# ---------------------------------------------------------------------------
# Lexicon, by category.

LEX = {
    "female_pl": ["women", "girls", "ladies", "females", "moms", "mothers", "wives", "gals"],
    "male_pl": ["men", "guys", "gentlemen", "fathers", "husbands", "dudes"],
    "female_name": ["sarah", "maria", "emily", "jessica", "anna", "laura", "rachel",
                    "olivia", "priya", "chloe", "hannah", "nina", "grace", "julia"],
    "male_name": ["tom", "james", "david", "mark", "john", "peter", "kevin", "raj",
                  "daniel", "steve", "omar", "luke"],
    "stereo": ["emotional", "hysterical", "bossy", "moody", "dramatic", "fragile", "weak",
               "irrational", "sensitive", "shrill", "catty", "clingy", "naive", "ditzy",
               "hormonal", "whiny", "needy", "flaky", "timid", "gossipy", "nagging",
               "overemotional", "high-maintenance", "squeamish"],
    "appearance": ["pretty", "cute", "hot", "sexy", "attractive", "gorgeous", "beautiful",
                   "curvy", "skinny", "blonde", "good-looking", "stunning"],
    "domestic": ["cooking", "cleaning", "laundry", "babysitting", "baking", "knitting",
                 "sewing", "ironing", "dusting", "mopping", "housework", "homemaking",
                 "dishes", "diapers", "chores", "vacuuming"],
    "dimin": ["sweetheart", "honey", "sweetie", "darling", "babe", "dear", "doll",
              "missy", "princess", "cupcake", "toots"],
    "clerical": ["make the coffee", "take the notes", "order the snacks", "plan the party",
                 "bring the cake", "fetch lunch", "water the plants", "tidy the kitchen",
                 "serve the drinks", "decorate the office"],
    "benevolent": ["nurturing", "caring", "gentle", "sweet", "delicate", "motherly",
                   "soft-spoken", "maternal", "graceful", "demure"],
    "competence": ["qualified", "experienced", "talented", "skilled", "capable", "brilliant",
                   "competent", "reliable", "organized", "thorough", "diligent", "efficient",
                   "knowledgeable", "dedicated", "creative", "analytical", "proactive",
                   "resourceful", "productive", "decisive", "meticulous", "strategic"],
    "legit": ["busy", "overbooked", "new", "junior", "remote", "traveling", "unavailable",
              "sick", "away", "occupied", "swamped", "offsite"],
    "work_task": ["lead the team", "manage the budget", "run the project", "negotiate contracts",
                  "write code", "chair the meeting", "close the deal", "present results",
                  "review the design", "handle the client", "fix the server", "audit the accounts",
                  "train new hires", "plan the launch", "analyze the data", "debug the build",
                  "draft the proposal", "approve the invoices"],
    "work_noun": ["budget", "roadmap", "launch", "audit", "proposal", "contract", "deadline",
                  "presentation", "report", "forecast", "campaign", "client", "merger",
                  "pipeline", "quarter", "release", "strategy", "spreadsheet", "invoice",
                  "prototype", "schedule", "migration", "survey", "rollout"],
    "job": ["engineer", "manager", "director", "developer", "analyst", "surgeon", "pilot",
            "accountant", "architect", "scientist", "lawyer", "executive", "supervisor",
            "consultant", "programmer", "technician", "chemist", "professor", "editor",
            "designer", "auditor", "mechanic"],
    "technical": ["finance", "engineering", "statistics", "physics", "machinery",
                  "networking", "software", "economics", "logistics", "hardware"],
    "work_place": ["boardroom", "office", "lab", "workshop", "factory", "cockpit",
                   "server room", "trading floor"],
    "positive_verb": ["like", "enjoy", "try", "use", "recommend", "review", "test", "order"],
    "product": ["product", "tool", "app", "service", "update", "dashboard", "feature", "plan"],
    "day": ["monday", "tuesday", "wednesday", "thursday", "friday", "noon", "tomorrow",
            "next week"],
    "venue": ["bar", "cafe", "bakery", "diner", "pub", "deli", "bistro", "food truck"],
    "venue_adj": ["belgian", "italian", "quiet", "new", "tiny", "cozy", "busy", "old"],
    "praise": ["great", "excellent", "solid", "thoughtful", "clear", "impressive", "useful"],
}

# Each clean template is (label, text with {slot} markers).
SEXIST = [
    "{female_pl} are too {stereo} to {work_task}.",
    "{female_name} only got the promotion because she is {appearance}.",
    "{female_pl} should stay home and focus on {domestic}.",
    "a woman should never be a {job}, she is too {stereo}.",
    "let {male_name} handle the {work_noun}, {dimin}.",
    "{female_pl} always get more {stereo} than {male_pl}.",
    "we should hire a man as {job} because {female_pl} are {stereo}.",
    "{female_name} can {clerical} while the men {work_task}.",
    "why is a {appearance} girl like you working as a {job}?",
    "{female_pl} belong at home doing {domestic}, not in the {work_place}.",
    "calm down {dimin}, you are being {stereo} again.",
    "no woman will ever make a good {job}.",
    "{female_pl} do not understand {technical}.",
    "{female_pl} are naturally more {benevolent}, so they should leave {technical} to {male_pl}.",
    "she is pretty {competence} for a girl.",
    "{female_name} should {clerical} since she is the only woman here.",
    "the {job} role needs a man, {female_pl} are too {stereo} for it.",
    "{female_name} is too {appearance} to be taken seriously as a {job}.",
    "thanks {dimin}, now go {clerical}.",
    "{female_pl} are better suited to {domestic} than to {technical}.",
]
NEUTRAL = [
    "{female_pl} and {male_pl} should {positive_verb} this {product}.",
    "{female_name} got the promotion because she is {competence}.",
    "{female_name} will focus on the {work_noun} this week.",
    "a good {job} should be {competence} and {competence}.",
    "let {female_name} handle the {work_noun}, she knows it well.",
    "the {job} said she was too {legit} to join the call.",
    "{female_name} can {work_task} while {male_name} can {work_task}.",
    "we should hire a {competence} {job} for this role.",
    "{female_name} is a {competence} {job}.",
    "please send the {work_noun} to {female_name} before {day}.",
    "the {venue_adj} {venue} near the office was a great spot to go after work",
    "our team meeting about the {work_noun} ran long on {day}.",
    "{female_pl} deserve equal pay for equal work.",
    "{male_name} asked if the {work_noun} could wait until {day}.",
    "can you explain why the {work_noun} is late?",
    "{female_name} gave a {praise} talk about {technical} at the offsite.",
    "{male_name} and {female_name} will {work_task} together.",
    "the {work_noun} from {female_name} was {praise}.",
    "{female_name} is too {legit} to {work_task} this week.",
    "{female_pl} and {male_pl} in the {work_place} asked for more training in {technical}.",
]

SEED_SEXIST = [
    "Women always get more upset than men.",
    "The people at work are childish. it's run by women and when women dont agree to something, oh man.",
    "I'm going to miss her resting bitch face.",
    "Seeing as you two think this is a modelling competition, I give you two a score of negative ten for your looks.",
    "He thinks she should consult her gender before working here.",
]
SEED_NEUTRAL = [
    "No mountain is high enough for a girl to climb.",
    "The Belgian bar near the end of the road was a great spot to go after work",
    "It seems the world is not ready for one of the most powerful and influential countries to have a woman leader. So sad.",
    "Can you explain why what she described there is wrong?",
    "men and women should like this product.",
]

N_SEXIST = 110
N_NEUTRAL = 90


def fill(template):
    def repl(m):
        return rng.choice(LEX[m.group(1)])
    return re.sub(r"\{(\w+)\}", repl, template)


def norm_key(text):
    # Mirrors the C++ normalizer closely enough for uniqueness checks on the
    # clean generated sentences (lowercase, split terminal punctuation).
    t = text.lower()
    toks = []
    for w in t.split():
        core = w.rstrip(".!?,")
        if core:
            toks.append(core)
        toks.extend(list(w[len(core):]))
    return " ".join(toks)


def generate(templates, extra, n, label):
    out = [(s, label) for s in extra]
    seen = {norm_key(s) for s, _ in out}
    k = 0
    while len(out) < n:
        tpl = templates[k % len(templates)]
        k += 1
        s = fill(tpl)
        if norm_key(s) in seen:
            continue
        seen.add(norm_key(s))
        out.append((s, label))
    return out


def capitalize(s):
    return s[0].upper() + s[1:] if s else s


SLANG_SWAPS = [(" you ", " u "), (" are ", " r "), (" your ", " ur "), (" because ", " bc ")]
TRAIL_TAGS = ["#mkr", "#work", "#mondays", "#officelife", "#justsaying"]
SOURCES = ["twitter", "quotes", "press"]


def decorate(s, i):
    """Adds the social-media noise the normalizer is meant to remove."""
    kind = i % 9
    if kind == 0:
        s = s.rstrip(".") + " " + rng.choice(TRAIL_TAGS)
    elif kind == 1:
        s = "@coworker " + s
    elif kind == 2:
        for a, b in SLANG_SWAPS:
            if a in " " + s + " ":
                s = (" " + s + " ").replace(a, b, 1).strip()
                break
    elif kind == 3:
        s = s + " https://t.co/x" + str(i)
    elif kind == 4:
        for w in ("women", "men", "work", "team"):
            if re.search(r"\b" + w + r"\b", s):
                s = re.sub(r"\b" + w + r"\b", "#" + w, s, count=1)
                break
    return capitalize(s)


def build_corpus():
    sexist = generate(SEXIST, SEED_SEXIST, N_SEXIST, 1)
    neutral = generate(NEUTRAL, SEED_NEUTRAL, N_NEUTRAL, 0)
    rows = []
    for i, (s, y) in enumerate(sexist + neutral):
        seeded = s in SEED_SEXIST or s in SEED_NEUTRAL
        text = s if seeded else decorate(s, i)
        src = SOURCES[i % 3] if not seeded else "seed"
        rows.append((text, y, src))
    rng.shuffle(rows)
    # Retweet-style duplicates: same body, different decoration.
    dups = []
    for text, y, src in rows[:12:2]:
        body = re.sub(r"\s*https://\S+", "", text)
        dups.append((body.upper() + " " + rng.choice(TRAIL_TAGS), y, "twitter"))
    for d in dups:
        rows.insert(rng.randrange(len(rows) + 1), d)
    return rows


# ---------------------------------------------------------------------------
# Embeddings

def gauss_vec(scale):
    return [rng.gauss(0.0, scale) for _ in range(DIM)]


def add(*vs):
    return [sum(x) for x in zip(*vs)]


def mul(v, a):
    return [a * x for x in v]


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def tokens_of(text):
    t = text.lower()
    t = re.sub(r"[\"()\[\]{}]", " ", t)
    toks = []
    for w in t.split():
        if w.startswith("http") or w.startswith("www.") or "@" in w:
            continue
        w = w.replace("#", "")
        core = w.rstrip(".!?,")
        if core:
            toks.append(core)
        toks.extend(list(w[len(core):]))
    return toks


def build_embeddings(rows):
    gender = unit(gauss_vec(1.0))
    person = gauss_vec(0.35)
    derog = gauss_vec(0.35)   # shared by the demeaning categories
    workish = gauss_vec(0.35)  # shared by professional categories
    proto = {cat: gauss_vec(0.3) for cat in LEX}
    parent = {
        "stereo": derog, "appearance": derog, "domestic": derog, "dimin": derog,
        "clerical": derog, "benevolent": derog,
        "competence": workish, "legit": workish, "work_task": workish, "work_noun": workish,
        "job": workish, "technical": workish, "work_place": workish,
    }
    gender_sign = {"female_pl": 1.0, "female_name": 1.0, "male_pl": -1.0, "male_name": -1.0}
    bias = {"stereo": 0.35, "appearance": 0.45, "domestic": 0.35, "dimin": 0.4,
            "benevolent": 0.35, "clerical": 0.25, "technical": -0.2, "job": -0.15}

    word_cat = {}
    for cat, words in LEX.items():
        for phrase in words:
            for w in phrase.split():
                word_cat.setdefault(w, cat)
    extra_female = ["she", "her", "hers", "woman", "girl", "lady", "female", "mother", "wife"]
    extra_male = ["he", "him", "his", "man", "boy", "guy", "male", "father", "husband"]
    for w in extra_female:
        word_cat[w] = "female_pl"
    for w in extra_male:
        word_cat[w] = "male_pl"
    definitional = set(extra_female) | set(extra_male) | set(LEX["female_pl"]) | \
        set(LEX["male_pl"]) | set(LEX["female_name"]) | set(LEX["male_name"])

    vocab = []
    seen = set()
    for text, _, _ in rows:
        for t in tokens_of(text):
            if t not in seen:
                seen.add(t)
                vocab.append(t)
    # A handful of corpus words are deliberately absent, as in real coverage.
    missing = {"modelling", "dont", "gals", "toots", "high-maintenance"}
    # Distractor words that never occur in the corpus.
    distractors = ["river", "galaxy", "violin", "pepper", "glacier", "tennis", "marble",
                   "parrot", "canyon", "lantern", "saddle", "orchid", "tundra", "cobalt"]
    vectors = {}
    for w in vocab + distractors:
        if w in missing:
            continue
        cat = word_cat.get(w)
        if cat is None:
            v = gauss_vec(0.4)
        else:
            v = add(proto[cat], gauss_vec(0.22))
            if cat in parent:
                v = add(v, parent[cat])
            if cat in gender_sign:
                v = add(v, person, mul(gender, 0.9 * gender_sign[cat]))
            elif cat in bias:
                v = add(v, mul(gender, bias[cat]))
        vectors[w] = v

    def debias(v):
        d = sum(a * b for a, b in zip(v, gender))
        return [a - d * b for a, b in zip(v, gender)]

    gn = {w: (v if w in definitional else debias(v)) for w, v in vectors.items()}
    return vectors, gn


def write_vectors(path, vectors):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for w, v in vectors.items():
            f.write(w + " " + " ".join("%.5f" % x for x in v) + "\n")


def write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(["text", "label", "source"])
        for r in rows:
            wr.writerow(r)


def overfit_rows():
    pos = ["women are too emotional to lead.", "she is too pretty to be an engineer.",
           "girls should stick to cooking.", "calm down sweetheart.",
           "women are hysterical at work.", "ladies belong in the kitchen.",
           "she only got hired because she is cute.", "moms are too fragile for finance."]
    neg = ["the budget report is due friday.", "sarah is a qualified engineer.",
           "please send the proposal today.", "the team will review the design.",
           "maria will lead the project.", "the client meeting ran long.",
           "our analyst is very thorough.", "the release ships next week."]
    return [(s, 1, "fixture") for s in pos] + [(s, 0, "fixture") for s in neg]


def main():
    os.makedirs(OUT, exist_ok=True)
    rows = build_corpus()
    write_csv(os.path.join(OUT, "statements.csv"), rows)
    vec, gn = build_embeddings(rows + overfit_rows())
    write_vectors(os.path.join(OUT, "glove.fixture.100d.txt"), vec)
    write_vectors(os.path.join(OUT, "gn_glove.fixture.100d.txt"), gn)
    clean = [r for r in rows if r[2] != "twitter" or not r[0].isupper()]
    mini = [r for r in clean if r[1] == 1][:10] + [r for r in clean if r[1] == 0][:10]
    write_csv(os.path.join(OUT, "mini20.csv"), mini)
    write_csv(os.path.join(OUT, "overfit16.csv"), overfit_rows())
    print("rows:", len(rows), "positive:", sum(r[1] for r in rows), "vectors:", len(vec))


if __name__ == "__main__":
    main()
