"""A tiny deterministic sequence-to-sequence model.

The default "seeded-tiny" model is a GRU encoder/decoder with randomly
initialized but seed-fixed weights and a word-level vocabulary of chess
commentary terms, square names, and the pipeline's tag sentinels.  It is
not trained — the server's job is contract fidelity (stable greedy
decoding, finite per-continuation log-probabilities), not text quality.
A real pretrained checkpoint can be substituted via the ``model`` config
field; see :func:`load_model`.
"""

from __future__ import annotations

import threading

import torch
import torch.nn.functional as F
from torch import nn

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"

_SQUARES = [f"{f}{r}" for f in "abcdefgh" for r in range(1, 9)]
_WORDS = (
    "white black pawn knight bishop rook queen king moves captures takes "
    "castles kingside queenside check checkmate mate blunder mistake "
    "inaccuracy excellent good strong weak better was the a an this that "
    "to on at from with and or but now here very position game opening "
    "middlegame endgame attack defense threat plan idea center file rank "
    "diagonal tempo development material advantage equal winning losing "
    "draw sacrifice exchange pin fork skewer gambit fianchetto en passant "
    "promotes . , ! ? !! ?? !?"
).split()
_SENTINELS = (
    "[v1] [PGN] [PIECES] [ATTACKS] [MOVE] [Unconditioned] "
    "[short] [medium] [long]"
).split() + ["[Commentary", "Type]", "[Move", "Quality]", "[Suggested", "Move]",
             "[Pronoun]", "[Proper", "Noun]", "Description", "Comparison",
             "Planning/Rationale", "Contextual", "General"]

VOCAB = [PAD, BOS, EOS, UNK] + _SQUARES + _WORDS + _SENTINELS
_INDEX = {token: i for i, token in enumerate(VOCAB)}


def encode(text: str) -> list[int]:
    return [_INDEX.get(token, _INDEX[UNK]) for token in text.split()]


class TinySeq2Seq(nn.Module):
    """GRU encoder/decoder over the word vocabulary above."""

    def __init__(self, hidden: int = 64, seed: int = 0):
        super().__init__()
        generator_state = torch.random.get_rng_state()
        torch.manual_seed(seed)
        try:
            vocab = len(VOCAB)
            self.embedding = nn.Embedding(vocab, hidden, padding_idx=_INDEX[PAD])
            self.encoder = nn.GRU(hidden, hidden, batch_first=True)
            self.decoder = nn.GRU(hidden, hidden, batch_first=True)
            self.head = nn.Linear(hidden, vocab)
        finally:
            torch.random.set_rng_state(generator_state)
        self.eval()
        # the GRUs are stateless across calls but not thread-safe
        self._lock = threading.Lock()

    def _encode_prompt(self, prompt: str) -> torch.Tensor:
        ids = encode(prompt) or [_INDEX[BOS]]
        tensor = torch.tensor([ids], dtype=torch.long)
        _, state = self.encoder(self.embedding(tensor))
        return state

    @torch.no_grad()
    def generate(self, prompt: str, max_tokens: int) -> str:
        """Greedy decoding: deterministic for a given prompt."""
        with self._lock:
            state = self._encode_prompt(prompt)
            token = _INDEX[BOS]
            out: list[str] = []
            for _ in range(max_tokens):
                step = self.embedding(torch.tensor([[token]], dtype=torch.long))
                output, state = self.decoder(step, state)
                logits = self.head(output[0, -1])
                # never emit structural tokens
                logits[_INDEX[PAD]] = float("-inf")
                logits[_INDEX[BOS]] = float("-inf")
                logits[_INDEX[UNK]] = float("-inf")
                token = int(torch.argmax(logits).item())
                if token == _INDEX[EOS]:
                    break
                out.append(VOCAB[token])
            return " ".join(out)

    @torch.no_grad()
    def score(self, prompt: str, continuations: list[str]) -> list[float]:
        """Sum of per-token log-probabilities for each continuation,
        conditioned on the prompt; same order as the input list."""
        with self._lock:
            state = self._encode_prompt(prompt)
            results: list[float] = []
            for continuation in continuations:
                ids = encode(continuation) or [_INDEX[EOS]]
                inputs = torch.tensor([[_INDEX[BOS]] + ids[:-1]], dtype=torch.long)
                outputs, _ = self.decoder(self.embedding(inputs), state)
                logprobs = F.log_softmax(self.head(outputs[0]), dim=-1)
                total = sum(float(logprobs[step, token]) for step, token in enumerate(ids))
                results.append(total)
            return results


def load_model(identifier: str = "seeded-tiny", seed: int = 0, device: str = "cpu"):
    """The built-in seeded model, or any Hugging Face seq2seq checkpoint
    wrapped to the same generate/score interface."""
    if identifier == "seeded-tiny":
        return TinySeq2Seq(seed=seed).to(device)
    return _HuggingFaceSeq2Seq(identifier, device)


class _HuggingFaceSeq2Seq:
    """Adapter giving a transformers checkpoint the TinySeq2Seq interface."""

    def __init__(self, identifier: str, device: str):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(identifier)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(identifier).to(device)
        self.model.eval()
        self.device = device
        self._lock = threading.Lock()

    @torch.no_grad()
    def generate(self, prompt: str, max_tokens: int) -> str:
        with self._lock:
            inputs = self.tokenizer(prompt, return_tensors="pt").to(self.device)
            output = self.model.generate(
                **inputs, max_new_tokens=max_tokens, do_sample=False, num_beams=1
            )
            return self.tokenizer.decode(output[0], skip_special_tokens=True)

    @torch.no_grad()
    def score(self, prompt: str, continuations: list[str]) -> list[float]:
        with self._lock:
            inputs = self.tokenizer(prompt, return_tensors="pt").to(self.device)
            results = []
            for continuation in continuations:
                labels = self.tokenizer(continuation, return_tensors="pt").to(self.device)
                out = self.model(**inputs, labels=labels["input_ids"])
                tokens = labels["input_ids"].shape[1]
                results.append(-float(out.loss) * tokens)
            return results
