#!/usr/bin/env python3
"""Fine-tune a checkpoint for binary hate-speech detection and write a
prediction file for `sosbias fairness gaps`.

Inputs are the train/validation/test TSVs written by `sosbias fairness
split`. Each needs a text column, a 0/1 label column and a subgroup column
holding `attribute:group` tokens joined by `;` (may be empty).

    python3 predict_hatespeech.py --model bert-base-uncased --data-dir splits \
        --text-column text --label-column label --subgroup-column subgroups \
        --output predictions.tsv

Defaults: 3 epochs, batch size 32, learning rate 2e-5, max length 61.
The toolkit itself never trains models; this driver is a convenience.
"""

import argparse
import csv
import os

import numpy as np
import torch
from torch.utils.data import DataLoader
from transformers import AutoModelForSequenceClassification, AutoTokenizer, set_seed


def read_tsv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f, delimiter="\t", quoting=csv.QUOTE_NONE))


def batches(rows, tok, args, shuffle):
    def collate(chunk):
        enc = tok([r[args.text_column] for r in chunk], padding=True, truncation=True,
                  max_length=args.max_length, return_tensors="pt")
        enc["labels"] = torch.tensor([int(r[args.label_column]) for r in chunk])
        return enc
    g = torch.Generator().manual_seed(args.seed)
    return DataLoader(rows, batch_size=args.batch_size, shuffle=shuffle, collate_fn=collate, generator=g)


@torch.no_grad()
def positive_scores(model, rows, tok, args, device):
    model.eval()
    out = []
    for batch in batches(rows, tok, args, shuffle=False):
        batch = {k: v.to(device) for k, v in batch.items()}
        logits = model(**{k: v for k, v in batch.items() if k != "labels"}).logits
        out.extend(torch.softmax(logits, dim=-1)[:, 1].cpu().tolist())
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", required=True)
    ap.add_argument("--data-dir", required=True)
    ap.add_argument("--text-column", default="text")
    ap.add_argument("--label-column", default="label")
    ap.add_argument("--subgroup-column", default="subgroups")
    ap.add_argument("--id-column", default=None, help="defaults to the 1-based test row number")
    ap.add_argument("--epochs", type=int, default=3)
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--learning-rate", type=float, default=2e-5)
    ap.add_argument("--max-length", type=int, default=61)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--device", default="cuda" if torch.cuda.is_available() else "cpu")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    set_seed(args.seed)
    device = torch.device(args.device)
    train = read_tsv(os.path.join(args.data_dir, "train.tsv"))
    valid = read_tsv(os.path.join(args.data_dir, "validation.tsv"))
    test = read_tsv(os.path.join(args.data_dir, "test.tsv"))

    tok = AutoTokenizer.from_pretrained(args.model)
    model = AutoModelForSequenceClassification.from_pretrained(args.model, num_labels=2).to(device)
    opt = torch.optim.AdamW(model.parameters(), lr=args.learning_rate)

    for epoch in range(args.epochs):
        model.train()
        for batch in batches(train, tok, args, shuffle=True):
            batch = {k: v.to(device) for k, v in batch.items()}
            loss = model(**batch).loss
            loss.backward()
            opt.step()
            opt.zero_grad()
        scores = positive_scores(model, valid, tok, args, device)
        labels = np.array([int(r[args.label_column]) for r in valid])
        acc = float(np.mean((np.array(scores) >= 0.5) == labels)) if len(valid) else float("nan")
        print(f"epoch {epoch + 1}: validation accuracy {acc:.4f}")

    scores = positive_scores(model, test, tok, args, device)
    with open(args.output, "w", encoding="utf-8") as f:
        f.write(f"# model\t{args.model}\n")
        f.write(f"# epochs\t{args.epochs}\n# batch_size\t{args.batch_size}\n")
        f.write(f"# learning_rate\t{args.learning_rate}\n# max_length\t{args.max_length}\n# seed\t{args.seed}\n")
        f.write("id\ttrue_label\tscore\tsubgroups\n")
        for i, (row, s) in enumerate(zip(test, scores), start=1):
            rid = row[args.id_column] if args.id_column else str(i)
            f.write(f"{rid}\t{int(row[args.label_column])}\t{min(max(s, 0.0), 1.0)!r}\t{row.get(args.subgroup_column, '')}\n")


if __name__ == "__main__":
    main()
