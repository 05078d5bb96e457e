from wpsskm.seqio import format_fasta


def write_dataset(ds, directory, stem="data"):
    fasta = directory / f"{stem}.fasta"
    labels = directory / f"{stem}.tsv"
    fasta.write_text(format_fasta(ds.sequences))
    labels.write_text("".join(f"{s.id}\t{l}\n" for s, l in zip(ds.sequences, ds.labels)))
    return fasta, labels


def drop_time_column(csv_text):
    return [line.rsplit(",", 1)[0] for line in csv_text.splitlines()]
