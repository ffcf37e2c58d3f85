#!/usr/bin/env python3
"""Regenerates data/synthetic_headlines.csv and data/vocab.txt.

The corpus is a small, balanced set of Indonesian-flavored headlines:
clickbait built from teaser templates, non-clickbait built from plain
declarative news templates. Output is deterministic for a fixed seed.
"""

import argparse
import csv
import pathlib
import random

CLICKBAIT_TEMPLATES = [
    "{n} rahasia {topic} yang bikin kamu kaget",
    "kamu tidak akan percaya apa yang dilakukan {who} ini",
    "wow! ternyata begini cara {who} {verb_casual}",
    "inilah {n} alasan kenapa {topic} bikin heboh",
    "viral! {who} ini bikin netizen melongo",
    "simak {n} fakta mengejutkan tentang {topic}",
    "nomor {n} bikin kamu geleng kepala! {topic} ternyata begini",
    "yang terjadi selanjutnya bikin {who} menangis",
    "bikin penasaran, {who} lakukan hal tak terduga ini",
    "jangan kaget! ini dia {n} trik {topic} yang jarang diketahui",
    "heboh, {who} ungkap rahasia {topic} yang bikin merinding",
    "gak nyangka, ternyata {topic} bisa bikin kamu {feeling}",
]

NEWS_TEMPLATES = [
    "{official} resmikan {project} di {place}",
    "{institution} tetapkan suku bunga acuan {pct} persen",
    "harga {commodity} di {place} naik {pct} persen pekan ini",
    "{official} tinjau pembangunan {project} di {place}",
    "dpr sahkan rancangan undang-undang tentang {policy}",
    "{institution} laporkan inflasi {place} sebesar {pct} persen",
    "pemerintah alokasikan anggaran {policy} tahun depan",
    "banjir rendam ratusan rumah warga di {place}",
    "{official} bahas kerja sama {policy} dengan negara tetangga",
    "produksi {commodity} nasional meningkat pada kuartal ketiga",
    "{institution} umumkan jadwal seleksi pegawai negeri",
    "ekspor {commodity} dari {place} capai target tahunan",
]

SLOTS = {
    "n": ["3", "5", "7", "10", "12"],
    "topic": ["diet", "artis", "karier", "kecantikan", "smartphone", "liburan",
              "tidur", "makanan", "hubungan", "keuangan"],
    "who": ["artis", "selebgram", "pria", "wanita", "nenek", "anak kecil",
            "pasangan", "youtuber"],
    "verb_casual": ["kaya mendadak", "turun berat badan", "tetap awet muda",
                    "jadi viral"],
    "feeling": ["bahagia", "ketagihan", "terharu", "syok"],
    "official": ["presiden", "gubernur", "menteri perhubungan", "wali kota",
                 "bupati", "menteri keuangan"],
    "project": ["jembatan", "bendungan", "jalan tol", "pelabuhan",
                "rumah sakit", "bandara"],
    "place": ["jakarta", "surabaya", "kalimantan timur", "sulawesi selatan",
              "bandung", "medan", "papua", "jawa tengah"],
    "institution": ["bank indonesia", "badan pusat statistik", "kementerian",
                    "otoritas jasa keuangan"],
    "pct": ["2", "3,5", "4", "5,75", "1,2"],
    "commodity": ["beras", "cabai", "minyak goreng", "batu bara", "kopi",
                  "kelapa sawit"],
    "policy": ["pendidikan", "kesehatan", "energi", "perpajakan",
               "perdagangan", "infrastruktur"],
}

# Common words beyond the corpus so the vocabulary is not a closed list.
EXTRA_WORDS = """
dan di ke dari yang untuk dengan pada ini itu akan tidak ada juga sudah
karena oleh dalam bisa lebih saat hari tahun baru kata warga kota negara
berita terkini polisi sekolah siswa guru pasar ekonomi politik olahraga
sepak bola timnas menang kalah gempa hujan cuaca kereta pesawat mobil motor
""".split()

AFFIXES = ["##nya", "##kan", "##an", "##i", "##lah", "##kah", "##pun",
           "##ku", "##mu"]

CHARS = list("abcdefghijklmnopqrstuvwxyz0123456789!?.,:;'\"-()%")


def fill(template, rng):
    out = template
    for key, values in SLOTS.items():
        token = "{" + key + "}"
        while token in out:
            out = out.replace(token, rng.choice(values), 1)
    return out


def generate(per_class, seed):
    rng = random.Random(seed)
    rows = set()
    clickbait, news = [], []
    while len(clickbait) < per_class:
        h = fill(rng.choice(CLICKBAIT_TEMPLATES), rng)
        if h not in rows:
            rows.add(h)
            clickbait.append(h)
    while len(news) < per_class:
        h = fill(rng.choice(NEWS_TEMPLATES), rng)
        if h not in rows:
            rows.add(h)
            news.append(h)
    data = [(h[0].upper() + h[1:], 1) for h in clickbait]
    data += [(h[0].upper() + h[1:], 0) for h in news]
    rng.shuffle(data)
    return data


def vocabulary(data):
    words = set(EXTRA_WORDS)
    for text, _ in data:
        for w in text.lower().split():
            words.add(w.strip("!?,.:;"))
    for template in CLICKBAIT_TEMPLATES + NEWS_TEMPLATES:
        for w in template.split():
            if "{" not in w:
                words.add(w.strip("!?,.:;"))
    for values in SLOTS.values():
        for v in values:
            words.update(v.split())
    words.discard("")
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
    tokens += sorted(words)
    tokens += AFFIXES
    tokens += [c for c in CHARS if c not in words]
    tokens += ["##" + c for c in CHARS]
    seen = set()
    unique = []
    for t in tokens:
        if t not in seen:
            seen.add(t)
            unique.append(t)
    return unique


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default=str(
        pathlib.Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--per-class", type=int, default=100)
    parser.add_argument("--seed", type=int, default=2022)
    args = parser.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = generate(args.per_class, args.seed)
    with open(out / "synthetic_headlines.csv", "w", newline="",
              encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["text", "label"])
        writer.writerows(data)
    with open(out / "vocab.txt", "w", encoding="utf-8") as f:
        for token in vocabulary(data):
            f.write(token + "\n")


if __name__ == "__main__":
    main()
