#!/usr/bin/env python3
"""Serve a Hugging Face masked language model over JSON lines.

Reads one request per line on stdin and writes one response per line on
stdout. See `sosbias::scoring::process` for the message table.

    python3 hf_mlm_backend.py --model bert-base-uncased
"""

import argparse
import json
import sys

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer


class Server:
    def __init__(self, name, device):
        self.name = name
        self.device = torch.device(device)
        self.tok = AutoTokenizer.from_pretrained(name)
        self.model = AutoModelForMaskedLM.from_pretrained(name).to(self.device).eval()
        # Head applied to final hidden states; None when the layout is unknown.
        if hasattr(self.model, "cls"):
            self.head = self.model.cls
        elif hasattr(self.model, "lm_head"):
            self.head = self.model.lm_head
        else:
            self.head = None
        self.hidden_size = self.model.config.hidden_size if self.head is not None else 0

    def ids(self, tokens, mask=None):
        ids = self.tok.convert_tokens_to_ids(tokens)
        unk = self.tok.unk_token_id
        for t, i in zip(tokens, ids):
            if i == unk and t != self.tok.unk_token:
                raise ValueError(f"token {t!r} is outside the vocabulary")
        if mask is not None:
            ids[mask] = self.tok.mask_token_id
        ids = self.prefix() + ids + self.suffix()
        return torch.tensor([ids], device=self.device)

    def prefix(self):
        first = self.tok.cls_token_id if self.tok.cls_token_id is not None else self.tok.bos_token_id
        return [] if first is None else [first]

    def suffix(self):
        last = self.tok.sep_token_id if self.tok.sep_token_id is not None else self.tok.eos_token_id
        return [] if last is None else [last]

    def offset(self):
        return len(self.prefix())

    @torch.no_grad()
    def masked_log_prob(self, tokens, position):
        out = self.model(input_ids=self.ids(tokens, mask=position))
        logits = out.logits[0, position + self.offset()]
        target = self.tok.convert_tokens_to_ids(tokens[position])
        return torch.log_softmax(logits.double(), dim=-1)[target].item()

    @torch.no_grad()
    def encode(self, tokens, mask):
        out = self.model(input_ids=self.ids(tokens, mask=mask), output_hidden_states=True)
        start = self.offset()
        hidden = out.hidden_states[-1][0, start : start + len(tokens)]
        return hidden.double().cpu().tolist()

    @torch.no_grad()
    def head_log_prob(self, hidden, target):
        h = torch.tensor([hidden], dtype=torch.float32, device=self.device)
        logits = self.head(h)[0]
        tid = self.tok.convert_tokens_to_ids(target)
        return torch.log_softmax(logits.double(), dim=-1)[tid].item()

    def handle(self, req):
        op = req.get("op")
        if op == "info":
            return {"model_id": f"hf:{self.name}", "hidden_size": self.hidden_size}
        if op == "tokenize":
            return {"tokens": self.tok.tokenize(req["text"])}
        if op == "masked_log_prob":
            return {"log_prob": self.masked_log_prob(req["tokens"], req["position"])}
        if op == "encode":
            if self.head is None:
                raise ValueError("hidden states are not exposed for this model")
            return {"hidden": self.encode(req["tokens"], req.get("mask"))}
        if op == "head_log_prob":
            if self.head is None:
                raise ValueError("output head is not exposed for this model")
            return {"log_prob": self.head_log_prob(req["hidden"], req["target"])}
        raise ValueError(f"unknown op {op!r}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", required=True)
    ap.add_argument("--device", default="cpu")
    args = ap.parse_args()
    torch.manual_seed(0)
    server = Server(args.model, args.device)
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            reply = server.handle(json.loads(line))
        except Exception as e:  # reported to the caller, never fatal
            reply = {"error": f"{type(e).__name__}: {e}"}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
